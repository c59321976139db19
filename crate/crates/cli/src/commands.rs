use serde::Serialize;
use serde_json::{json, Value};

use qhlat_core::commutant::{pseudometric_basis_spectral, NULLSPACE_MAX_DIM};
use qhlat_core::conjecture::verify_alternating_conjecture_with;
use qhlat_core::metric::{assemble_metric_with, basis_hamiltonian, DEFAULT_QH_TOL};
use qhlat_core::patterns::DEFAULT_PATTERN_TOL;
use qhlat_core::{
    build_hamiltonian, classify_pattern, find_exceptional_point, positivity_frontier,
    pseudometric_basis, scan_domain_2d, spectrum_report, verify_quasi_hermiticity, EpOptions,
    FrontierSpec, GridSpec, LatticeParams, NullSpaceOptions, ParameterDirection, Preset,
    PseudometricBasis,
};

use crate::args::{Command, Convention};
use crate::config::Settings;
use crate::output::{domain_csv, domain_ppm, domain_text, matrix_text, table_value};
use crate::{CliError, Report};

pub const DEFAULT_TABLE_DIMS: [usize; 4] = [10, 30, 50, 100];

fn to_value<T: Serialize>(v: &T) -> Result<Value, CliError> {
    serde_json::to_value(v).map_err(|e| CliError::io(format!("cannot encode result: {e}")))
}

fn even_dim(dim: usize) -> Result<usize, CliError> {
    if dim == 0 || dim % 2 != 0 {
        return Err(CliError::input(format!(
            "--dim must be a positive even number, got {dim}"
        )));
    }
    Ok(dim)
}

fn parse_preset(s: &str) -> Result<Preset, CliError> {
    s.parse::<Preset>().map_err(CliError::from)
}

/// Couplings from `--params`, or `--preset` with `--mag` and `--dim`, or zeros for a bare `--dim`.
pub fn resolve_params(s: &Settings) -> Result<LatticeParams, CliError> {
    if let Some(p) = &s.params {
        let params = LatticeParams::new(p.clone())?;
        if let Some(dim) = s.dim {
            if dim != params.dim() {
                return Err(CliError::input(format!(
                    "--dim {dim} disagrees with {} couplings (N = {})",
                    params.len(),
                    params.dim()
                )));
            }
        }
        return Ok(params);
    }
    let dim = s
        .dim
        .ok_or_else(|| CliError::input("need --params, or --dim with an optional --preset and --mag"))?;
    let n = even_dim(dim)? / 2;
    match &s.preset {
        Some(name) => {
            let mag = s
                .mag
                .ok_or_else(|| CliError::input("--preset needs --mag"))?;
            let dir = ParameterDirection::from_preset(parse_preset(name)?, n)?;
            Ok(dir.to_params(mag)?)
        }
        None => Ok(LatticeParams::zeros(n)?),
    }
}

fn ep_options(s: &Settings, p_max: Option<f64>) -> EpOptions {
    EpOptions {
        p_max: p_max.or(s.p_max),
        param_tol: s.tol_param,
        reality_tol: s.tol_imag,
        ..EpOptions::default()
    }
}

pub fn execute(cmd: &Command, s: &Settings) -> Result<Report, CliError> {
    match cmd {
        Command::Spectrum => spectrum(s),
        Command::Ep { p_max } => ep(s, *p_max),
        Command::Table1 { dims } => {
            let rows = (1..=4)
                .zip(["alpha", "beta", "gamma", "delta"])
                .map(|(k, label)| (label, Preset::SingleSite(k)))
                .collect::<Vec<_>>();
            table(s, dims.as_deref(), &rows)
        }
        Command::Table2 { dims } => table(
            s,
            dims.as_deref(),
            &[("alternating", Preset::Alternating), ("uniform", Preset::Uniform)],
        ),
        Command::Domain { axes, range, steps } => domain(s, axes.as_deref(), range.as_deref(), *steps),
        Command::Pseudometrics { patterns } => pseudometrics(s, *patterns),
        Command::Metric {
            eps,
            frontier_steps,
            frontier_range,
            samples,
            seed,
            free_first,
            pd_tol,
        } => metric(
            s,
            MetricArgs {
                eps: eps.as_deref(),
                frontier_steps: *frontier_steps,
                frontier_range: frontier_range.as_deref(),
                samples: *samples,
                seed: *seed,
                free_first: *free_first,
                pd_tol: *pd_tol,
            },
        ),
        Command::Conjecture { alpha_ref } => conjecture(s, *alpha_ref),
    }
}

fn spectrum(s: &Settings) -> Result<Report, CliError> {
    let params = resolve_params(s)?;
    let h = build_hamiltonian(&params)?;
    let rep = spectrum_report(&h, s.tol_imag)?;
    let mut text = format!(
        "N = {}, couplings {}\nreal spectrum: {} (max |Im| = {:.3e}, tol {:e})\nmin gap {:.6e}, residual {:.3e}, eigenvector condition {:.3e}\n  k           Re           Im\n",
        rep.dim, params, rep.is_real, rep.max_imag, rep.reality_tol, rep.min_gap, rep.residual, rep.eigvec_condition
    );
    let mut csv = String::from("k,re,im\n");
    for (k, z) in rep.eigenvalues.iter().enumerate() {
        text.push_str(&format!("{:>3} {:>12.6} {:>12.6}\n", k + 1, z.re, z.im));
        csv.push_str(&format!("{},{},{}\n", k + 1, z.re, z.im));
    }
    Ok(Report {
        payload: json!({ "params": to_value(&params)?, "spectrum": to_value(&rep)? }),
        text,
        csv: Some(csv),
        ppm: None,
        warnings: Vec::new(),
    })
}

fn ep(s: &Settings, p_max: Option<f64>) -> Result<Report, CliError> {
    let name = s
        .preset
        .as_deref()
        .ok_or_else(|| CliError::input("ep needs --preset"))?;
    let dim = even_dim(s.dim.ok_or_else(|| CliError::input("ep needs --dim"))?)?;
    let dir = ParameterDirection::from_preset(parse_preset(name)?, dim / 2)?;
    let res = find_exceptional_point(&dir, &ep_options(s, p_max))?;
    let text = format!(
        "direction {}, N = {}\np_crit = {} (bracket [{:.8}, {:.8}], {} bisection steps)\n",
        dir.preset(),
        dim,
        table_value(res.p_crit),
        res.bracket.0,
        res.bracket.1,
        res.iterations
    );
    let csv = format!(
        "preset,dim,p_crit,p_lo,p_hi\n{},{},{},{},{}\n",
        dir.preset(),
        dim,
        res.p_crit,
        res.bracket.0,
        res.bracket.1
    );
    Ok(Report {
        payload: to_value(&res)?,
        text,
        csv: Some(csv),
        ppm: None,
        warnings: res.warnings.clone(),
    })
}

#[derive(Serialize)]
struct TableCell {
    n: usize,
    dim: usize,
    p_crit: f64,
    bracket: (f64, f64),
    warnings: Vec<String>,
}

#[derive(Serialize)]
struct TableRow {
    label: String,
    preset: String,
    cells: Vec<TableCell>,
}

fn table(s: &Settings, dims: Option<&[usize]>, rows: &[(&str, Preset)]) -> Result<Report, CliError> {
    let dims: Vec<usize> = dims
        .map(<[usize]>::to_vec)
        .or_else(|| s.dims.clone())
        .unwrap_or_else(|| DEFAULT_TABLE_DIMS.to_vec());
    if dims.is_empty() {
        return Err(CliError::input("--dims must not be empty"));
    }
    let opts = ep_options(s, None);
    let mut out = Vec::with_capacity(rows.len());
    let mut warnings = Vec::new();
    for (label, preset) in rows {
        let mut cells = Vec::with_capacity(dims.len());
        for &n in &dims {
            let dim = even_dim(s.convention.matrix_dim(n))?;
            let dir = ParameterDirection::from_preset(*preset, dim / 2)?;
            let res = find_exceptional_point(&dir, &opts)?;
            warnings.extend(res.warnings.iter().map(|w| format!("{label}, n={n}: {w}")));
            cells.push(TableCell {
                n,
                dim,
                p_crit: res.p_crit,
                bracket: res.bracket,
                warnings: res.warnings,
            });
        }
        out.push(TableRow {
            label: label.to_string(),
            preset: preset.to_string(),
            cells,
        });
    }

    let conv = match s.convention {
        Convention::LatticeSize => "lattice-size",
        Convention::ParamCount => "param-count",
    };
    let mut text = format!("convention: {conv}\n{:<12}", "");
    for n in &dims {
        text.push_str(&format!("{:>9}", format!("n={n}")));
    }
    text.push('\n');
    let mut csv = String::from("row,n,dim,p_crit\n");
    for row in &out {
        text.push_str(&format!("{:<12}", row.label));
        for c in &row.cells {
            text.push_str(&format!("{:>9}", table_value(c.p_crit)));
            csv.push_str(&format!("{},{},{},{}\n", row.label, c.n, c.dim, table_value(c.p_crit)));
        }
        text.push('\n');
    }
    Ok(Report {
        payload: json!({ "convention": s.convention, "dims": dims, "rows": to_value(&out)? }),
        text,
        csv: Some(csv),
        ppm: None,
        warnings,
    })
}

fn pair<T: Copy>(v: &[T], what: &str) -> Result<(T, T), CliError> {
    match v {
        [a, b] => Ok((*a, *b)),
        _ => Err(CliError::input(format!("{what} needs exactly two comma-separated values"))),
    }
}

fn domain(
    s: &Settings,
    axes: Option<&[usize]>,
    range: Option<&[f64]>,
    steps: Option<usize>,
) -> Result<Report, CliError> {
    let fixed = if s.params.is_some() || s.preset.is_some() {
        resolve_params(s)?
    } else {
        LatticeParams::zeros(even_dim(s.dim.unwrap_or(6))? / 2)?
    };
    let axes = axes.map(<[usize]>::to_vec).or_else(|| s.axes.clone()).unwrap_or(vec![1, 2]);
    let (ai, aj) = pair(&axes, "--axes")?;
    if ai == 0 || aj == 0 {
        return Err(CliError::input("--axes are 1-based"));
    }
    let range = range.map(<[f64]>::to_vec).or_else(|| s.range.clone()).unwrap_or(vec![-1.2, 1.2]);
    let (lo, hi) = pair(&range, "--range")?;
    let steps = steps.or(s.steps).unwrap_or(200);
    let grid = GridSpec::square(lo, hi, steps)?;
    let scan = scan_domain_2d(ai - 1, aj - 1, &fixed, &grid, s.tol_imag)?;
    Ok(Report {
        payload: json!({ "real_fraction": scan.real_fraction(), "scan": to_value(&scan)? }),
        text: domain_text(&scan),
        csv: Some(domain_csv(&scan)),
        ppm: Some(domain_ppm(&scan)),
        warnings: Vec::new(),
    })
}

fn basis_for(s: &Settings, params: &LatticeParams) -> Result<PseudometricBasis, CliError> {
    let h = build_hamiltonian(params)?;
    let basis = if h.dim() <= NULLSPACE_MAX_DIM {
        let opts = NullSpaceOptions {
            rank_tol: s.rank_tol,
            ..NullSpaceOptions::default()
        };
        pseudometric_basis(&h, &opts)?
    } else {
        pseudometric_basis_spectral(&h)?
    };
    Ok(basis)
}

fn pseudometrics(s: &Settings, patterns: bool) -> Result<Report, CliError> {
    let params = resolve_params(s)?;
    let basis = basis_for(s, &params)?;
    let h = basis_hamiltonian(&basis)?;
    let residual = basis.max_residual(&h);
    let grids: Option<Vec<Vec<String>>> = patterns.then(|| {
        basis
            .elements
            .iter()
            .map(|p| classify_pattern(p, DEFAULT_PATTERN_TOL).rows())
            .collect()
    });

    let mut text = format!(
        "N = {}, couplings {}, normalization {}, max residual {:.3e}\n",
        basis.dim,
        params,
        match &basis.normalization {
            qhlat_core::Normalization::Standard => "standard".to_string(),
            qhlat_core::Normalization::NonStandard { pivots } => format!("non-standard ({} pivots)", pivots.len()),
        },
        residual
    );
    for (k, p) in basis.elements.iter().enumerate() {
        text.push_str(&format!("\nP^{}\n", k + 1));
        text.push_str(&matrix_text(p.matrix()));
        if let Some(g) = &grids {
            text.push('\n');
            for row in &g[k] {
                text.push_str(&format!("  {row}\n"));
            }
        }
    }
    let mut payload = json!({
        "params": to_value(&params)?,
        "max_residual": residual,
        "basis": to_value(&basis)?,
    });
    if let Some(g) = grids {
        payload["patterns"] = to_value(&g)?;
    }
    Ok(Report {
        payload,
        text,
        csv: None,
        ppm: None,
        warnings: Vec::new(),
    })
}

struct MetricArgs<'a> {
    eps: Option<&'a [f64]>,
    frontier_steps: Option<usize>,
    frontier_range: Option<&'a [f64]>,
    samples: Option<usize>,
    seed: Option<u64>,
    free_first: bool,
    pd_tol: Option<f64>,
}

fn metric(s: &Settings, a: MetricArgs<'_>) -> Result<Report, CliError> {
    let params = resolve_params(s)?;
    let basis = basis_for(s, &params)?;
    let n = basis.dim;
    let eps = a.eps.map(<[f64]>::to_vec).unwrap_or_else(|| {
        let mut e = vec![0.0; n];
        e[0] = 1.0;
        e
    });
    let pd_tol = a.pd_tol.unwrap_or(s.pd_tol);
    let cand = assemble_metric_with(&basis, &eps, pd_tol)?;
    let h = basis_hamiltonian(&basis)?;
    let qh = verify_quasi_hermiticity(&h, cand.theta.matrix(), DEFAULT_QH_TOL)?;

    let (lo, hi) = pair(a.frontier_range.unwrap_or(&[-0.9, 0.9]), "--frontier-range")?;
    let spec = match (a.frontier_steps, a.samples) {
        (Some(_), Some(_)) => {
            return Err(CliError::input("choose either --frontier-steps or --samples"))
        }
        (Some(steps), None) => Some(FrontierSpec::Grid {
            first: 1.0,
            min: lo,
            max: hi,
            steps,
        }),
        (None, Some(samples)) => Some(FrontierSpec::Sampled {
            samples,
            min: lo,
            max: hi,
            seed: a.seed.or(s.seed).unwrap_or(0),
            fix_first: !a.free_first,
        }),
        (None, None) => None,
    };
    let frontier = spec
        .map(|sp| positivity_frontier(&basis, &sp, pd_tol))
        .transpose()?;

    let mut text = format!(
        "N = {}, couplings {}\neps = {:?}\npositivity: {:?}, min eigenvalue {:.6e}, residual {:.3e} ({})\n",
        n,
        params,
        eps,
        cand.positivity,
        cand.min_eigenvalue,
        qh.residual,
        if qh.pass { "pass" } else { "fail" }
    );
    text.push_str("\nTheta\n");
    text.push_str(&matrix_text(cand.theta.matrix()));
    let csv = match &frontier {
        Some(f) => {
            text.push_str(&format!(
                "\nfrontier: {} of {} positive ({:.4})\n",
                f.positive_count,
                f.points.len(),
                f.positive_fraction
            ));
            let mut c: String = (1..=n).map(|k| format!("eps_{k},")).collect();
            c.push_str("verdict,min_eigenvalue\n");
            for p in &f.points {
                for e in &p.eps {
                    c.push_str(&format!("{e},"));
                }
                c.push_str(&format!("{},{:e}\n", to_value(&p.positivity)?.as_str().unwrap_or(""), p.min_eigenvalue));
            }
            c
        }
        None => {
            let mut c: String = (1..=n).map(|k| format!("eps_{k},")).collect();
            c.push_str("verdict,min_eigenvalue,residual\n");
            for e in &eps {
                c.push_str(&format!("{e},"));
            }
            c.push_str(&format!(
                "{},{:e},{:e}\n",
                to_value(&cand.positivity)?.as_str().unwrap_or(""),
                cand.min_eigenvalue,
                qh.residual
            ));
            c
        }
    };
    let mut payload = json!({
        "params": to_value(&params)?,
        "candidate": to_value(&cand)?,
        "quasi_hermiticity": to_value(&qh)?,
    });
    if let Some(f) = &frontier {
        payload["frontier"] = to_value(f)?;
    }
    Ok(Report {
        payload,
        text,
        csv: Some(csv),
        ppm: None,
        warnings: Vec::new(),
    })
}

fn conjecture(s: &Settings, alpha_ref: Option<f64>) -> Result<Report, CliError> {
    let dim = even_dim(s.dim.unwrap_or(6))?;
    let alpha = s.mag.unwrap_or(0.05);
    let alpha_ref = alpha_ref.unwrap_or(0.5 * alpha);
    let r = verify_alternating_conjecture_with(dim, alpha, alpha_ref, DEFAULT_PATTERN_TOL)?;
    let text = format!(
        "alternating model, N = {}, a = {} (exceptional point {})\nentries in {{1, +ia, -ia}}: {} (max deviation {:.3e})\neven elements independent of a: {} (max deviation {:.3e} against a = {})\neven elements equal the free-chain ones to {:.3e}\nreference skeleton match: {}\nsmallest eigenvalue of P^1: {}\n",
        r.dim,
        r.alpha,
        table_value(r.alpha_crit),
        r.entries_in_set,
        r.max_entry_deviation,
        r.even_parameter_free,
        r.max_even_deviation,
        r.alpha_ref,
        r.max_even_vs_free,
        match r.reference_match {
            Some(b) => b.to_string(),
            None => "n/a (stored only for N = 6)".to_string(),
        },
        format!("{:.6}", r.first_min_eigenvalue)
    );
    Ok(Report {
        payload: to_value(&r)?,
        text,
        csv: None,
        ppm: None,
        warnings: Vec::new(),
    })
}
