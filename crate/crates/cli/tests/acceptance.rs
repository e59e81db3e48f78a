//! The acceptance suite: one line per criterion, non-zero exit if any fails.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wickrot::analysis::{
    default_s_grid, line_integral, line_zeta_analytic, line_zeta_fourier, spectral_dimension_estimate,
    StabilizationSpec, TraceLevel,
};
use wickrot::clifford::{run_suite, Signature, DEFAULT_SEED};
use wickrot::index::{
    graded_index_exact, mckean_singer_index, residue_pairing_analytic, winding_oracle, Unitary, WindingGrid,
};
use wickrot::linalg::{self, c64, CMat, HermitianEigen};
use wickrot::models::{
    check_first_order_conditions, finite_geometry, harmonic_oscillator, mehler_kernel, mehler_series,
    ModelDescriptor,
};
use wickrot::operator::{universal_bounds, DerivedOperators, TruncatedOperator, UniversalBounds};
use wickrot::Exec;

type Outcome = Result<String, String>;

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn fixture(name: &str) -> ModelDescriptor {
    let p = root().join("models").join(name);
    serde_json::from_str(&fs::read_to_string(&p).unwrap()).unwrap()
}

fn fixtures() -> Vec<(String, ModelDescriptor)> {
    let mut files: Vec<PathBuf> = fs::read_dir(root().join("models"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|p| {
            let d = serde_json::from_str(&fs::read_to_string(&p).unwrap()).unwrap();
            (p.file_name().unwrap().to_string_lossy().into_owned(), d)
        })
        .collect()
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn random_matrix(rng: &mut ChaCha8Rng, n: usize, m: usize) -> CMat {
    CMat::from_fn(n, m, |_, _| c64::new(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0))
}

fn oscillator_dimension() -> Outcome {
    let start = Instant::now();
    let input: Vec<TraceLevel> = [128usize, 256, 512, 1024]
        .iter()
        .map(|&n| {
            let m = harmonic_oscillator(n).unwrap();
            TraceLevel {
                level: n,
                a: m.sample("gauss").unwrap().op.matrix().clone(),
                h: m.derived.mean_square.matrix().clone(),
            }
        })
        .collect();
    let r = spectral_dimension_estimate(&input, &default_s_grid(), &StabilizationSpec::default(), Exec::default())
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    check(
        r.brackets(1.0, 0.1) && elapsed <= Duration::from_secs(60),
        format!("bracket {:?}, p_hat {:?}, {:.1} s", r.bracket, r.p_hat, elapsed.as_secs_f64()),
    )
}

fn line_trace_constant() -> Outcome {
    let ig = line_integral(|x| 1.0 / (1.0 + x * x), 400);
    let analytic = line_zeta_analytic(3.0, ig);
    let fourier = line_zeta_fourier(3.0, ig, 400);
    check(
        (analytic - 1.0).abs() <= 1e-8 && (analytic - fourier).abs() <= 1e-8,
        format!("analytic {analytic:.15}, fourier {fourier:.15}"),
    )
}

fn index_pairing() -> Outcome {
    let start = Instant::now();
    let grid = WindingGrid::default();
    let s_grid: Vec<f64> = (0..30).map(|k| 0.55 + 0.05 * k as f64).collect();
    let mut worst = 0.0f64;
    for m in -2i64..=2 {
        let u = Unitary::Winding(m);
        let r = residue_pairing_analytic(&u, &s_grid, &grid).map_err(|e| e.to_string())?;
        let w = winding_oracle(&u, &grid).map_err(|e| e.to_string())?;
        worst = worst.max((r.raw + m as f64).abs());
        if (r.raw + m as f64).abs() > 1e-10 || w.winding != m || !w.exact || r.pairing != m || !r.pass {
            return Err(format!("m = {m}: residue {}, winding {}, pairing {}", r.raw, w.winding, r.pairing));
        }
    }
    let elapsed = start.elapsed();
    check(
        elapsed <= Duration::from_secs(5),
        format!("max |residue + m| = {worst:.1e}, {:.2} s", elapsed.as_secs_f64()),
    )
}

fn mehler() -> Outcome {
    let mut worst = 0.0f64;
    for t in [0.5, 1.0, 2.0] {
        for i in 0..61 {
            for j in 0..61 {
                let x = -3.0 + 0.1 * i as f64;
                let y = -3.0 + 0.1 * j as f64;
                let k = mehler_kernel(t, x, y).map_err(|e| e.to_string())?;
                worst = worst.max((k - mehler_series(t, x, y, 200)).abs());
            }
        }
    }
    check(worst <= 1e-8, format!("max error {worst:.2e}"))
}

fn bounds_on_fixtures() -> Outcome {
    let mut worst = UniversalBounds {
        dirac_ratio: 0.0,
        curvature_ratio: 0.0,
    };
    let mut count = 0;
    for (name, d) in fixtures() {
        for n in d.default_levels().map_err(|e| e.to_string())? {
            let m = d.build_at(n).map_err(|e| format!("{name}: {e}"))?;
            let b = universal_bounds(&m.d).map_err(|e| format!("{name}: {e}"))?;
            if !b.holds(1e-10) {
                return Err(format!("{name} N = {n}: {b:?}"));
            }
            worst.dirac_ratio = worst.dirac_ratio.max(b.dirac_ratio);
            worst.curvature_ratio = worst.curvature_ratio.max(b.curvature_ratio);
            count += 1;
        }
    }
    Ok(format!(
        "{count} (model, N) pairs, max dirac ratio {:.12}, max curvature ratio {:.12}",
        worst.dirac_ratio, worst.curvature_ratio
    ))
}

fn wick_algebra() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut herm, mut decomp, mut min_eig) = (0.0f64, 0.0f64, f64::INFINITY);
    for k in 0..100 {
        let n = 1 + k % 16;
        let d = TruncatedOperator::from_matrix(random_matrix(&mut rng, n, n), "D").map_err(|e| e.to_string())?;
        let der = DerivedOperators::new(&d);
        herm = herm
            .max(linalg::hermitian_residual(der.wick_plus.matrix()))
            .max(linalg::hermitian_residual(der.wick_minus.matrix()));
        let (a, b) = der.decomposition_residuals();
        decomp = decomp.max(a).max(b);
        for w in [&der.wick_plus, &der.wick_minus] {
            let sq = w.matrix() * w.matrix();
            let e = HermitianEigen::new(&linalg::scale(&(&sq + sq.adjoint()), linalg::re(0.5)))
                .map_err(|e| e.to_string())?;
            min_eig = min_eig.min(e.values.iter().copied().fold(f64::INFINITY, f64::min));
        }
    }
    check(
        herm <= 1e-13 && decomp <= 1e-12 && min_eig >= -1e-10,
        format!("hermiticity {herm:.1e}, decomposition {decomp:.1e}, min eigenvalue {min_eig:.1e}"),
    )
}

fn clifford_suite() -> Outcome {
    let mut worst = 0.0f64;
    let mut count = 0;
    for n in 1..=6usize {
        for t in 0..=n {
            let sig = Signature::new(t, n - t).map_err(|e| e.to_string())?;
            let s = run_suite(sig, 1000, DEFAULT_SEED).map_err(|e| e.to_string())?;
            let spin = s.spin_symmetry.map_or(0.0, |r| r.iter().copied().fold(0.0, f64::max));
            let r = s.square.max_residual().max(s.mixed.max_residual()).max(s.rotation_residual).max(spin);
            if !s.pass || r > 1e-12 {
                return Err(format!("({t},{}) residual {r:.2e}", n - t));
            }
            worst = worst.max(r);
            count += 1;
        }
    }
    Ok(format!("{count} signatures, max residual {worst:.1e}"))
}

fn graded_index() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let t_list = [0.1, 0.5, 1.0, 2.0];
    let mut spread = 0.0f64;
    let mut nonzero = 0;
    for k in 0..100 {
        let p = 1 + rng.random_range(0..8usize);
        let q = 1 + rng.random_range(0..8usize);
        // every third sample is rank deficient
        let b = if k % 3 == 0 {
            let r = rng.random_range(0..p.min(q));
            &random_matrix(&mut rng, p, r) * &random_matrix(&mut rng, r, q)
        } else {
            random_matrix(&mut rng, p, q)
        };
        let exact = graded_index_exact(&b);
        let m = finite_geometry(&b).map_err(|e| e.to_string())?;
        let r = mckean_singer_index(&m, &t_list).map_err(|e| e.to_string())?;
        if r.pairing != exact || r.spread.unwrap_or(f64::INFINITY) > 1e-10 {
            return Err(format!("B {p}x{q}: graded trace {} vs exact {exact}, spread {:?}", r.pairing_raw, r.spread));
        }
        spread = spread.max(r.spread.unwrap_or(0.0));
        nonzero += usize::from(exact != 0);
    }
    Ok(format!("100 samples ({nonzero} with nonzero index), max t-spread {spread:.1e}"))
}

fn vanishing() -> Outcome {
    let m = fixture("lorentz.json").build().map_err(|e| e.to_string())?;
    let r_norm = linalg::op_norm(m.derived.curvature_defect.matrix());
    let r = mckean_singer_index(&m, &[0.1, 0.5, 1.0, 2.0]).map_err(|e| e.to_string())?;
    let worst = r.table.iter().map(|e| e.value.abs()).fold(0.0, f64::max);
    check(
        r_norm <= 1e-10 && worst <= 1e-10,
        format!("||R_D|| = {r_norm:.1e}, max |Tr(Gamma exp(-t D_E^2))| = {worst:.1e}"),
    )
}

fn admissibility() -> Outcome {
    let valid = fixture("first_order_valid.json").first_order_spec().map_err(|e| e.to_string())?;
    let invalid = fixture("first_order_invalid.json").first_order_spec().map_err(|e| e.to_string())?;
    let v = check_first_order_conditions(&valid, 64);
    let a = check_first_order_conditions(&invalid, 64);
    let b = check_first_order_conditions(&invalid, 64);
    let w = a.first_violation().map(|c| (c.name.clone(), c.witness.clone()));
    check(
        v.admissible && !a.admissible && a == b && w.is_some(),
        format!("valid admissible {}, invalid rejected by {:?}", v.admissible, w),
    )
}

fn strip_timestamp(report: &str) -> String {
    report
        .lines()
        .filter(|l| !l.trim_start().starts_with("\"generated_at\""))
        .collect::<Vec<_>>()
        .join("\n")
}

fn determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_wickrot");
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for threads in ["1", "8"] {
        let out = tmp.path().join(format!("t{threads}"));
        let status = Command::new(bin)
            .args(["all", "--model"])
            .arg(root().join("models"))
            .args(["--threads", threads, "--out"])
            .arg(&out)
            .output()
            .map_err(|e| e.to_string())?;
        if !matches!(status.status.code(), Some(0) | Some(2)) {
            return Err(format!("exit {:?}: {}", status.status.code(), String::from_utf8_lossy(&status.stderr)));
        }
        let report = fs::read_to_string(out.join("report.json")).map_err(|e| e.to_string())?;
        let csv = fs::read(out.join("zeta.csv")).map_err(|e| e.to_string())?;
        outputs.push((strip_timestamp(&report), csv));
    }
    check(
        outputs[0] == outputs[1],
        format!("report {} bytes, zeta.csv {} bytes, threads 1 vs 8", outputs[0].0.len(), outputs[0].1.len()),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("oscillator spectral dimension", oscillator_dimension),
        ("D_E trace constant", line_trace_constant),
        ("index pairing", index_pairing),
        ("Mehler consistency", mehler),
        ("universal bounds", bounds_on_fixtures),
        ("Wick-rotation algebra", wick_algebra),
        ("Clifford suite", clifford_suite),
        ("graded index", graded_index),
        ("vanishing theorem", vanishing),
        ("first-order admissibility", admissibility),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", k + 1);
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
