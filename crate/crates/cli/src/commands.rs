//! Command handlers. Every handler returns the process exit code: 0 success,
//! 1 usage/parse, 2 not-certified/not-applicable, 3 refuted, 4 numeric
//! failure.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde_json::json;

use mspectral::bim::{self, BimConfig, InitStrategy, ShiftStrategy};
use mspectral::elasticity::{self, Verdict};
use mspectral::error::ExactError;
use mspectral::families;
use mspectral::fixtures;
use mspectral::io;
use mspectral::linalg::Tolerances;
use mspectral::sampling;
use mspectral::structure;
use mspectral::tensor::PsTensor;
use mspectral::{bounds, exact, oracle};

use crate::args::GenerateArgs;
use crate::manifest::Manifest;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NOT_APPLICABLE: i32 = 2;
pub const EXIT_REFUTED: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;

pub struct Ctx {
    pub out: Option<PathBuf>,
}

impl Ctx {
    fn emit(&self, text: &str) -> i32 {
        match &self.out {
            Some(path) => {
                if let Err(e) = fs::write(path, text) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return EXIT_USAGE;
                }
                EXIT_OK
            }
            None => {
                println!("{text}");
                EXIT_OK
            }
        }
    }

    fn emit_json(&self, manifest: &Manifest, key: &str, value: serde_json::Value) -> i32 {
        let doc = json!({ "manifest": manifest, key: value });
        self.emit(&serde_json::to_string_pretty(&doc).expect("json serialization"))
    }
}

fn fail(code: i32, msg: impl std::fmt::Display) -> i32 {
    eprintln!("error: {msg}");
    code
}

fn load_tensor(path: &Path, repair: bool) -> Result<mspectral::Validated<f64>, (i32, String)> {
    let text = fs::read_to_string(path)
        .map_err(|e| (EXIT_USAGE, format!("cannot read {}: {e}", path.display())))?;
    io::tensor_from_json(&text, &Tolerances::default(), repair)
        .map_err(|e| (EXIT_USAGE, format!("{}: {e}", path.display())))
}

/// Serialize a float with 17 significant digits for CSV cells.
fn csv_num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn validate(ctx: &Ctx, path: &Path, repair: bool) -> i32 {
    let mut manifest = Manifest::new("validate").input(path).config(json!({ "repair": repair }));
    let validated = manifest.time("validate", || load_tensor(path, repair));
    match validated {
        Ok(v) => ctx.emit_json(
            &manifest,
            "report",
            json!({
                "m": v.tensor.m(),
                "n": v.tensor.n(),
                "scale": v.tensor.scale(),
                "flags": v.flags,
                "repaired": v.repaired,
                "max_symmetry_deviation": v.max_deviation,
            }),
        ),
        Err((code, msg)) => fail(code, msg),
    }
}

pub fn bounds_cmd(ctx: &Ctx, path: &Path) -> i32 {
    let mut manifest = Manifest::new("bounds").input(path);
    let v = match load_tensor(path, false) {
        Ok(v) => v,
        Err((code, msg)) => return fail(code, msg),
    };
    let report = manifest.time("bounds", || bounds::bound_report(&v.tensor));
    ctx.emit_json(&manifest, "report", serde_json::to_value(&report).expect("serialize"))
}

fn parse_shift(text: &str) -> Result<ShiftStrategy<f64>, String> {
    match text {
        "wang" => Ok(ShiftStrategy::WangTau),
        "li1" => Ok(ShiftStrategy::LiTau1),
        "li2" => Ok(ShiftStrategy::LiTau2),
        "es" => Ok(ShiftStrategy::EsUpper),
        other => match other.strip_prefix("value:") {
            Some(v) => v
                .parse::<f64>()
                .map(ShiftStrategy::Explicit)
                .map_err(|e| format!("bad shift value {v:?}: {e}")),
            None => Err(format!("unknown shift strategy {other:?} (wang|li1|li2|es|value:<eta>)")),
        },
    }
}

fn parse_init(text: &str) -> Result<InitStrategy<f64>, String> {
    match text {
        "unfold" => Ok(InitStrategy::UnfoldEig),
        "mes" => Ok(InitStrategy::MesEig),
        other => match other.strip_prefix("random:") {
            Some(s) => s
                .parse::<u64>()
                .map(InitStrategy::Random)
                .map_err(|e| format!("bad random seed {s:?}: {e}")),
            None => Err(format!("unknown init strategy {other:?} (unfold|mes|random:<seed>)")),
        },
    }
}

#[allow(clippy::too_many_arguments)]
pub fn solve(
    ctx: &Ctx,
    path: &Path,
    shift: &str,
    init: &str,
    tol: f64,
    max_iter: usize,
    residual_stop: bool,
    history_csv: Option<&Path>,
) -> i32 {
    let mut manifest = Manifest::new("solve").input(path).config(json!({
        "shift": shift, "init": init, "tol": tol, "max_iter": max_iter,
        "residual_stop": residual_stop,
    }));
    let v = match load_tensor(path, false) {
        Ok(v) => v,
        Err((code, msg)) => return fail(code, msg),
    };
    let config = BimConfig {
        shift: match parse_shift(shift) {
            Ok(s) => s,
            Err(e) => return fail(EXIT_USAGE, e),
        },
        init: match parse_init(init) {
            Ok(i) => i,
            Err(e) => return fail(EXIT_USAGE, e),
        },
        tol,
        max_iter,
        residual_stop,
    };
    if let InitStrategy::Random(seed) = config.init {
        manifest.seed = Some(seed);
    }
    let result = match manifest.time("solve", || bim::bim_solve(&v.tensor, &config)) {
        Ok(r) => r,
        Err(e) => return fail(EXIT_NUMERIC, e),
    };
    if let Some(hpath) = history_csv {
        let mut csv = String::from("iteration,lambda_shifted,lambda\n");
        for (k, lam_shifted) in result.history.iter().enumerate() {
            let _ = writeln!(
                csv,
                "{k},{},{}",
                csv_num(*lam_shifted),
                csv_num(lam_shifted - result.shift_value)
            );
        }
        if let Err(e) = fs::write(hpath, csv) {
            return fail(EXIT_USAGE, format!("cannot write {}: {e}", hpath.display()));
        }
    }
    ctx.emit_json(
        &manifest,
        "result",
        json!({
            "lambda": result.eigenpair.lambda,
            "x": result.eigenpair.x,
            "y": result.eigenpair.y,
            "residual_x": result.eigenpair.residual_x,
            "residual_y": result.eigenpair.residual_y,
            "iterations": result.iterations,
            "converged": result.converged,
            "shift_value": result.shift_value,
        }),
    )
}

pub fn exact_cmd(ctx: &Ctx, path: &Path) -> i32 {
    let mut manifest = Manifest::new("exact").input(path);
    let v = match load_tensor(path, false) {
        Ok(v) => v,
        Err((code, msg)) => return fail(code, msg),
    };
    let tol = Tolerances::default();
    let omega = manifest.time("omega", || exact::exact_from_omega(&v.tensor, &tol));
    let solution = match omega {
        Ok(sol) => Some(sol),
        // class conditions unmet (including negative entries): try the
        // decomposition route, which has no sign hypothesis
        Err(ExactError::NotApplicable(_)) | Err(ExactError::Bounds(_)) => {
            let decomp = match manifest.time("matricize", || exact::matricize(&v.tensor, &tol)) {
                Ok(d) => d,
                Err(e) => return fail(EXIT_NUMERIC, e),
            };
            match manifest
                .time("closed_form", || exact::closed_form_if_orthogonal(&v.tensor, &decomp, &tol))
            {
                Ok(sol) => Some(sol),
                Err(ExactError::NotApplicable(_)) => None,
                Err(e) => return fail(EXIT_NUMERIC, e),
            }
        }
        Err(e) => return fail(EXIT_NUMERIC, e),
    };
    match solution {
        Some(sol) => ctx.emit_json(
            &manifest,
            "result",
            json!({
                "applicable": true,
                "method": sol.method,
                "lambda": sol.eigenpair.lambda,
                "x": sol.eigenpair.x,
                "y": sol.eigenpair.y,
                "residual_x": sol.eigenpair.residual_x,
                "residual_y": sol.eigenpair.residual_y,
            }),
        ),
        None => {
            let code = ctx.emit_json(
                &manifest,
                "result",
                json!({ "applicable": false, "reason": "no structural class matched" }),
            );
            if code == EXIT_OK {
                EXIT_NOT_APPLICABLE
            } else {
                code
            }
        }
    }
}

pub fn structure_cmd(ctx: &Ctx, path: &Path) -> i32 {
    let mut manifest = Manifest::new("structure").input(path);
    let v = match load_tensor(path, false) {
        Ok(v) => v,
        Err((code, msg)) => return fail(code, msg),
    };
    let tol = Tolerances::default();
    let report = manifest.time("structure", || structure::structure_report(&v.tensor, &tol));
    ctx.emit_json(&manifest, "report", serde_json::to_value(&report).expect("serialize"))
}

pub fn certify(ctx: &Ctx, path: &Path, eta: Option<f64>, scan: Option<usize>) -> i32 {
    let mut manifest =
        Manifest::new("certify").input(path).config(json!({ "eta": eta, "scan_eta": scan }));
    let v = match load_tensor(path, false) {
        Ok(v) => v,
        Err((code, msg)) => return fail(code, msg),
    };
    let cert = if let Some(steps) = scan {
        match manifest.time("scan", || elasticity::scan_eta(&v.tensor, steps)) {
            Ok(Some((_, cert))) => cert,
            Ok(None) => match elasticity::certify_strong_ellipticity(&v.tensor, eta) {
                Ok(c) => c,
                Err(e) => return fail(EXIT_NUMERIC, e),
            },
            Err(e) => return fail(EXIT_NUMERIC, e),
        }
    } else {
        match manifest.time("certify", || elasticity::certify_strong_ellipticity(&v.tensor, eta)) {
            Ok(c) => c,
            Err(e) => return fail(EXIT_NUMERIC, e),
        }
    };
    let verdict = cert.verdict;
    let code = ctx.emit_json(
        &manifest,
        "certificate",
        serde_json::to_value(&cert).expect("serialize"),
    );
    if code != EXIT_OK {
        return code;
    }
    match verdict {
        Verdict::CertifiedStrongEllipticity => EXIT_OK,
        Verdict::NotCertified => EXIT_NOT_APPLICABLE,
        Verdict::RefutedNotEw => EXIT_REFUTED,
    }
}

pub fn oracle_cmd(
    ctx: &Ctx,
    path: &Path,
    restarts: usize,
    seed: u64,
    grid_resolution: Option<usize>,
) -> i32 {
    let mut manifest = Manifest::new("oracle").input(path).seed(seed).config(json!({
        "restarts": restarts, "grid_resolution": grid_resolution,
    }));
    let v = match load_tensor(path, false) {
        Ok(v) => v,
        Err((code, msg)) => return fail(code, msg),
    };
    let result = if let Some(res) = grid_resolution {
        match manifest.time("grid", || oracle::grid_search(&v.tensor, res)) {
            Ok(r) => r,
            Err(e) => return fail(EXIT_USAGE, e),
        }
    } else {
        manifest.time("multistart", || oracle::global_max_multistart(&v.tensor, restarts, seed, 1e-12))
    };
    ctx.emit_json(
        &manifest,
        "result",
        json!({
            "method": result.method,
            "lambda": result.best.lambda,
            "x": result.best.x,
            "y": result.best.y,
            "residual_x": result.best.residual_x,
            "residual_y": result.best.residual_y,
            "restarts": result.restarts,
            "local_values": result.local_values,
        }),
    )
}

pub fn generate(ctx: &Ctx, args: &GenerateArgs) -> i32 {
    let manifest = Manifest::new("generate").seed(args.seed).config(json!({
        "family": args.family, "m": args.m, "n": args.n, "h": args.h,
        "size": args.size, "variant": args.variant,
    }));
    let (tensor, clamps): (PsTensor<f64>, Vec<families::Clamp>) = match args.family.as_str() {
        "delta1" => (exact::gen_delta1(args.m, args.n, args.seed), vec![]),
        "position" => {
            let mut rng = sampling::rng_from_seed(args.seed);
            let g = mspectral::Mat::from_fn(args.m, args.m, |_, _| {
                sampling::uniform(&mut rng, 0.0, 1.0)
            });
            let psd = g.transpose().matmul(&g);
            let weights: Vec<f64> =
                (0..args.n).map(|_| sampling::uniform(&mut rng, 0.0, 1.0)).collect();
            (structure::separable_member(&weights, &psd), vec![])
        }
        "kron" => {
            let spec = exact::KroneckerSpec::<f64>::random_shared(args.n, args.m, args.seed);
            (exact::kron_build(&spec), vec![])
        }
        "rhombic" => {
            let mut rng = sampling::rng_from_seed(args.seed);
            let mut draw = || sampling::uniform(&mut rng, 0.0, 10.0);
            let params = elasticity::RhombicParams {
                c1111: draw(),
                c2222: draw(),
                c3333: draw(),
                c1122: draw(),
                c2233: draw(),
                c3311: draw(),
                c2323: draw(),
                c1313: draw(),
                c1212: draw(),
            };
            (elasticity::rhombic_generate(&params), vec![])
        }
        "figure:1" => {
            let h = args.h.unwrap_or(2.0);
            (families::shift_family(args.size, h), vec![])
        }
        "figure:4" => {
            let h = args.h.unwrap_or(1.0);
            let fam = families::tan_family(args.size, h);
            (fam.tensor, fam.clamps)
        }
        "figure:4inv" => {
            let fam = families::inverse_sine_family(args.size);
            (fam.tensor, fam.clamps)
        }
        "figure:5" => {
            let variant = match args.variant.as_deref() {
                Some("cos") => families::InitFamilyVariant::CosOffset,
                _ => families::InitFamilyVariant::SinOffset,
            };
            (families::init_family(args.size, variant), vec![])
        }
        other => match other.strip_prefix("fixture:") {
            Some(name) => match fixtures::all().into_iter().find(|(n, _)| *n == name) {
                Some((_, t)) => (t, vec![]),
                None => return fail(EXIT_USAGE, format!("unknown fixture {name:?}")),
            },
            None => return fail(EXIT_USAGE, format!("unknown family {other:?}")),
        },
    };
    // a valid tensor file with provenance attached; readers ignore the extras
    let mut doc: serde_json::Value =
        serde_json::from_str(&io::tensor_to_json(&tensor)).expect("tensor json");
    doc["manifest"] = serde_json::to_value(&manifest).expect("manifest json");
    if !clamps.is_empty() {
        doc["manifest"]["clamps"] = serde_json::to_value(&clamps).expect("clamps json");
    }
    ctx.emit(&serde_json::to_string_pretty(&doc).expect("json"))
}

struct CompareRow {
    id: String,
    m: usize,
    n: usize,
    fields: Vec<Option<f64>>,
    bim_iters: usize,
    timings: [f64; 5],
}

fn compare_one(id: String, t: &PsTensor<f64>, tol: f64) -> CompareRow {
    use std::time::Instant;
    let nonneg = t.is_nonnegative();
    let t0 = Instant::now();
    let es = if nonneg { bounds::es_upper(t).ok() } else { None };
    let mes = if nonneg { bounds::mes_lower(t).ok() } else { None };
    let t_r = t0.elapsed().as_secs_f64() * 1e3;
    let t0 = Instant::now();
    let tau = bounds::tau_wang(t);
    let t_tau = t0.elapsed().as_secs_f64() * 1e3;
    let t0 = Instant::now();
    let tau1 = bounds::tau1_li(t).ok();
    let t_tau1 = t0.elapsed().as_secs_f64() * 1e3;
    let t0 = Instant::now();
    let tau2 = bounds::tau2_li(t).ok();
    let t_tau2 = t0.elapsed().as_secs_f64() * 1e3;
    let t0 = Instant::now();
    let shift = if nonneg { ShiftStrategy::EsUpper } else { ShiftStrategy::WangTau };
    let bim = bim::bim_solve(t, &BimConfig { shift, tol, ..Default::default() }).ok();
    let t_bim = t0.elapsed().as_secs_f64() * 1e3;
    CompareRow {
        id,
        m: t.m(),
        n: t.n(),
        fields: vec![
            es.as_ref().map(|e| e.r1.value),
            es.as_ref().map(|e| e.r2.value),
            Some(tau),
            tau1,
            tau2,
            mes.as_ref().map(|m| m.lower_c.value),
            mes.as_ref().map(|m| m.lower_d.value),
            bim.as_ref().map(|b| b.eigenpair.lambda),
        ],
        bim_iters: bim.as_ref().map(|b| b.iterations).unwrap_or(0),
        timings: [t_r, t_tau, t_tau1, t_tau2, t_bim],
    }
}

pub fn compare(
    ctx: &Ctx,
    count: Option<usize>,
    dir: Option<&Path>,
    seed: u64,
    tol: f64,
    jobs: usize,
) -> i32 {
    let mut manifest = Manifest::new("compare").seed(seed).config(json!({
        "count": count, "dir": dir.map(|d| d.display().to_string()), "tol": tol,
    }));
    let tensors: Vec<(String, PsTensor<f64>)> = if let Some(dirpath) = dir {
        let mut entries: Vec<PathBuf> = match fs::read_dir(dirpath) {
            Ok(rd) => rd
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().map(|x| x == "json").unwrap_or(false))
                .collect(),
            Err(e) => return fail(EXIT_USAGE, format!("cannot read {}: {e}", dirpath.display())),
        };
        entries.sort();
        let mut loaded = Vec::with_capacity(entries.len());
        for p in entries {
            match load_tensor(&p, false) {
                Ok(v) => loaded.push((
                    p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default(),
                    v.tensor,
                )),
                Err((code, msg)) => return fail(code, msg),
            }
        }
        loaded
    } else {
        let count = count.unwrap_or(1000);
        let mut rng = sampling::rng_from_seed(seed);
        (0..count)
            .map(|i| {
                let t = PsTensor::from_fn_symmetrized(3, 3, |_, _, _, _| {
                    sampling::uniform(&mut rng, 0.0, 1.0)
                });
                (i.to_string(), t)
            })
            .collect()
    };
    if jobs > 0 {
        // a scoped pool keeps the global default untouched
        let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build();
        match pool {
            Ok(pool) => pool.install(|| run_compare_rows(ctx, &mut manifest, &tensors, tol)),
            Err(e) => fail(EXIT_NUMERIC, e),
        }
    } else {
        run_compare_rows(ctx, &mut manifest, &tensors, tol)
    }
}

fn run_compare_rows(
    ctx: &Ctx,
    manifest: &mut Manifest,
    tensors: &[(String, PsTensor<f64>)],
    tol: f64,
) -> i32 {
    let rows: Vec<CompareRow> = manifest.time("compare", || {
        tensors
            .par_iter()
            .map(|(id, t)| compare_one(id.clone(), t, tol))
            .collect()
    });
    let mut csv = String::new();
    let _ = writeln!(
        csv,
        "# manifest: {}",
        serde_json::to_string(manifest).expect("manifest json")
    );
    let _ = writeln!(
        csv,
        "id,m,n,R1,R2,tau,tau1,tau2,lowerC,lowerD,bim_lambda,bim_iters,t_R_ms,t_tau_ms,t_tau1_ms,t_tau2_ms,t_bim_ms"
    );
    for r in rows {
        let nums: Vec<String> = r
            .fields
            .iter()
            .map(|f| f.map(csv_num).unwrap_or_default())
            .collect();
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{:.3},{:.3},{:.3},{:.3},{:.3}",
            r.id,
            r.m,
            r.n,
            nums.join(","),
            r.bim_iters,
            r.timings[0],
            r.timings[1],
            r.timings[2],
            r.timings[3],
            r.timings[4],
        );
    }
    ctx.emit(csv.trim_end())
}
