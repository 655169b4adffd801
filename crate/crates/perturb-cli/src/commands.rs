use crate::report::{emit, num, Report};
use crate::spec::{parse_spec_file, spec_to_json};
use crate::{Cli, Command, Flags, TimeGrid};
use anyhow::{bail, Context, Result};
use num_complex::Complex64;
use perturb::improved::{
    golden_rule, improved_amplitude_from, improved_perturbed_energy, improved_transition_probability,
    revision_energies, GoldenRuleInput, ImprovedOptions, Intermediate, SecondOrderMap, MAX_IMPROVED_ORDER,
};
use perturb::model::{redivide_with, validate, RedivideOptions};
use perturb::oracle::{diagonalize, exact_transition_probability};
use perturb::series::{amplitude_order, SeriesOptions};
use perturb::terms::{enumerate_catalog, eval_closed_term, MAX_CLOSED_ORDER};
use perturb::{CMatrix, CVector, SplitSystem, SystemSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use std::path::Path;

pub fn run(cli: &Cli) -> Result<()> {
    let f = &cli.flags;
    let out = f.output.as_deref();
    match &cli.command {
        Command::Evolve {
            input,
            order,
            initial,
            grid,
        } => finish(evolve(f, input, *order, *initial, grid)?, out),
        Command::Compare { input, order, grid } => finish(compare(f, input, *order, grid)?, out),
        Command::Terms {
            order,
            input,
            t,
            gamma,
            gamma_prime,
        } => finish(terms(f, *order, input.as_deref(), *t, *gamma, *gamma_prime)?, out),
        Command::GoldenRule { input } => finish(golden(input)?, out),
        Command::TwoState { e1, e2, v, grid } => finish(two_state(f, *e1, *e2, *v, grid)?, out),
        Command::Energies { input } => finish(energies(f, input)?, out),
        Command::Validate { input } => finish(validate_report(f, input)?, out),
        Command::Sample {
            dimension,
            norm,
            gap,
            seed,
        } => emit(spec_to_json(&sample(*dimension, *norm, *gap, *seed)?).as_bytes(), out),
    }
}

fn finish(report: Report, out: Option<&Path>) -> Result<()> {
    emit(&report.render()?, out)
}

fn improved_options(f: &Flags) -> ImprovedOptions {
    ImprovedOptions {
        g_orders: f.g_orders as usize,
        uniform_g: f.uniform_g,
    }
}

fn series_options(f: &Flags) -> SeriesOptions {
    SeriesOptions {
        compensated: f.compensated_sum,
        ..SeriesOptions::default()
    }
}

fn load(f: &Flags, input: &Path) -> Result<(SystemSpec, SplitSystem)> {
    let spec = parse_spec_file(input)?;
    let opts = RedivideOptions {
        tol_deg: f.tol_deg,
        redivision: !f.no_redivision,
    };
    let sys = redivide_with(&spec, opts).with_context(|| format!("system in {}", input.display()))?;
    Ok((spec, sys))
}

fn common_meta(r: &mut Report, f: &Flags, input: &Path) {
    r.meta("input", input.display())
        .meta("redivision", !f.no_redivision)
        .meta("tol_deg", num(f.tol_deg))
        .meta("g_orders", f.g_orders)
        .meta("uniform_g", f.uniform_g)
        .meta("compensated_sum", f.compensated_sum);
}

fn grid_meta(r: &mut Report, g: &TimeGrid) {
    r.meta("t_grid", format!("{} {} {}", num(g.t_start), num(g.t_end), g.t_steps));
}

fn check_order(order: usize, opts: &SeriesOptions) -> Result<()> {
    if order > opts.max_order {
        bail!("--order {order} exceeds the series limit {}", opts.max_order);
    }
    Ok(())
}

fn evolve(f: &Flags, input: &Path, order: usize, initial: usize, grid: &TimeGrid) -> Result<Report> {
    let (_, sys) = load(f, input)?;
    let opts = series_options(f);
    check_order(order, &opts)?;
    let n = sys.dimension();
    if initial >= n {
        bail!("--initial {initial} is not a level of this {n}-level system");
    }
    let mut psi0 = CVector::zeros(n);
    psi0[initial] = Complex64::new(1.0, 0.0);
    let mut columns = vec!["t".to_string()];
    for k in 0..n {
        columns.push(format!("re_{k}"));
        columns.push(format!("im_{k}"));
    }
    columns.push("norm".into());
    let cols: Vec<&str> = columns.iter().map(String::as_str).collect();
    let mut r = Report::new("evolve", &cols);
    common_meta(&mut r, f, input);
    grid_meta(&mut r, grid);
    r.meta("order", order).meta("initial", initial);
    for t in grid.points()? {
        let psi = perturb::series::evolve_truncated(&sys, &psi0, t, order, &opts)?;
        let mut row = vec![num(t)];
        for z in psi.iter() {
            row.push(num(z.re));
            row.push(num(z.im));
        }
        row.push(num(psi.norm()));
        r.row(row);
    }
    Ok(r)
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |a, z| a.max(z.norm()))
}

fn compare(f: &Flags, input: &Path, order: usize, grid: &TimeGrid) -> Result<Report> {
    let (_, sys) = load(f, input)?;
    let opts = series_options(f);
    check_order(order, &opts)?;
    let iopts = improved_options(f);
    let rev = if sys.redivided {
        Some(revision_energies(&sys, iopts.g_orders)?)
    } else {
        None
    };
    let exact = diagonalize(&sys)?;
    let mut r = Report::new("compare", &["t", "order", "usual_error", "improved_error"]);
    common_meta(&mut r, f, input);
    grid_meta(&mut r, grid);
    r.meta("order", order).meta(
        "error",
        "max |U_exact - sum_{k<=order} A_k|; improved blank above order 3 or without redivision",
    );
    let n = sys.dimension();
    for t in grid.points()? {
        let u = exact.propagator(t);
        let mut usual = CMatrix::zeros(n, n);
        let mut improved = CMatrix::zeros(n, n);
        for l in 0..=order {
            usual += amplitude_order(&sys, l, t, &opts)?.values;
            let imp = match &rev {
                Some(rev) if l <= MAX_IMPROVED_ORDER => {
                    improved += improved_amplitude_from(&sys, rev, l, t, &iopts)?.values;
                    num(max_abs(&(&u - &improved)))
                }
                _ => String::new(),
            };
            r.row(vec![num(t), l.to_string(), num(max_abs(&(&u - &usual))), imp]);
        }
    }
    Ok(r)
}

fn terms(f: &Flags, order: usize, input: Option<&Path>, t: f64, gamma: usize, gamma_prime: usize) -> Result<Report> {
    let catalog = enumerate_catalog(order)?;
    let sys = match input {
        Some(path) if order <= MAX_CLOSED_ORDER => Some(load(f, path)?.1),
        _ => None,
    };
    let mut cols = vec!["index", "label", "partition"];
    if sys.is_some() {
        cols.extend(["re", "im"]);
    }
    let mut r = Report::new("terms", &cols);
    r.meta("order", order).meta("count", catalog.count());
    if let Some(path) = input {
        common_meta(&mut r, f, path);
    }
    if sys.is_some() {
        r.meta("t", num(t))
            .meta("gamma", gamma)
            .meta("gamma_prime", gamma_prime);
    }
    for (i, label) in catalog.labels.iter().enumerate() {
        let partition: Vec<String> = label.partition().iter().map(ToString::to_string).collect();
        let mut row = vec![i.to_string(), label.to_string(), partition.join(" ")];
        if let Some(sys) = &sys {
            let z = eval_closed_term(sys, label, t, gamma, gamma_prime)?;
            row.push(num(z.re));
            row.push(num(z.im));
        }
        r.row(row);
    }
    Ok(r)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GoldenFile {
    energies: Vec<f64>,
    density: Vec<f64>,
    coupling: Vec<f64>,
    e_beta: f64,
    duration: f64,
    #[serde(default)]
    intermediates: Vec<IntermediateFile>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct IntermediateFile {
    omega: f64,
    coupling_final: f64,
    coupling_initial: f64,
}

fn golden(input: &Path) -> Result<Report> {
    let text = std::fs::read_to_string(input).with_context(|| format!("cannot read {}", input.display()))?;
    let file: GoldenFile =
        serde_json::from_str(&text).with_context(|| format!("invalid golden-rule input in {}", input.display()))?;
    let map = SecondOrderMap {
        levels: file
            .intermediates
            .iter()
            .map(|k| Intermediate {
                omega: k.omega,
                coupling_final: k.coupling_final,
                coupling_initial: k.coupling_initial,
            })
            .collect(),
    };
    let data = GoldenRuleInput {
        energies: file.energies,
        density: file.density,
        coupling: file.coupling,
        e_beta: file.e_beta,
        duration: file.duration,
    };
    let g = golden_rule(&data, &map)?;
    let mut r = Report::new("golden-rule", &["w_f", "delta_w", "w"]);
    r.meta("input", input.display())
        .meta("grid_points", data.energies.len())
        .meta("intermediates", map.levels.len())
        .meta("duration", num(data.duration));
    r.row(vec![num(g.w_f), num(g.delta_w), num(g.w)]);
    Ok(r)
}

fn two_state(f: &Flags, e1: f64, e2: f64, v: f64, grid: &TimeGrid) -> Result<Report> {
    if e1.partial_cmp(&e2) != Some(std::cmp::Ordering::Less) {
        bail!("--e2 must exceed --e1");
    }
    let z = Complex64::new(0.0, 0.0);
    let g = CMatrix::from_row_slice(2, 2, &[z, Complex64::new(v, 0.0), Complex64::new(v, 0.0), z]);
    let sys = SplitSystem::from_parts(vec![e1, e2], g)?;
    let iopts = improved_options(f);
    let rev = revision_energies(&sys, iopts.g_orders)?;
    let et1 = improved_perturbed_energy(&sys, 0, &iopts)?.total;
    let et2 = improved_perturbed_energy(&sys, 1, &iopts)?.total;
    let exact = diagonalize(&sys)?;
    let mut r = Report::new(
        "two-state",
        &[
            "t",
            "p_usual",
            "p_improved",
            "p_exact",
            "e_tilde_1",
            "e_tilde_2",
            "e_exact_1",
            "e_exact_2",
        ],
    );
    r.meta("e1", num(e1))
        .meta("e2", num(e2))
        .meta("v", num(v))
        .meta("g_orders", f.g_orders);
    for (i, name) in ["g2", "g3", "g4", "g5"].iter().enumerate() {
        r.meta(
            name,
            format!("{} {}", num(rev.order(i + 2)[0]), num(rev.order(i + 2)[1])),
        );
    }
    grid_meta(&mut r, grid);
    for t in grid.points()? {
        let p = improved_transition_probability(&sys, 0, 1, t, &iopts)?;
        let pe = exact_transition_probability(&exact, 0, 1, t)?;
        r.row(vec![
            num(t),
            num(p.p_usual),
            num(p.p_improved),
            num(pe),
            num(et1),
            num(et2),
            num(exact.eigenvalues[0]),
            num(exact.eigenvalues[1]),
        ]);
    }
    Ok(r)
}

fn energies(f: &Flags, input: &Path) -> Result<Report> {
    let (_, sys) = load(f, input)?;
    let iopts = improved_options(f);
    let rev = revision_energies(&sys, iopts.g_orders)?;
    let tilde = rev.tilde_upto(iopts.g_orders);
    let exact = diagonalize(&sys)?.eigenvalues;
    let mut r = Report::new(
        "energies",
        &[
            "level",
            "e",
            "e_prime",
            "g2",
            "g3",
            "g4",
            "g5",
            "e_tilde",
            "e_exact",
            "difference",
        ],
    );
    common_meta(&mut r, f, input);
    r.meta("matching", "exact eigenvalues paired with levels by rank of e_prime");
    for (level, &e_tilde) in tilde.iter().enumerate() {
        let rank = (0..sys.dimension())
            .filter(|&j| (sys.energies[j], j) < (sys.energies[level], level))
            .count();
        r.row(vec![
            level.to_string(),
            num(sys.original_energies[level]),
            num(sys.energies[level]),
            num(rev.g2[level]),
            num(rev.g3[level]),
            num(rev.g4[level]),
            num(rev.g5[level]),
            num(e_tilde),
            num(exact[rank]),
            num(e_tilde - exact[rank]),
        ]);
    }
    Ok(r)
}

fn validate_report(f: &Flags, input: &Path) -> Result<Report> {
    let spec = parse_spec_file(input)?;
    let v = validate(&spec, f.tol_deg)?;
    let mut r = Report::new("validate", &["key", "value"]);
    r.meta("input", input.display()).meta("tol_deg", num(f.tol_deg));
    r.row(vec!["dimension".into(), v.dimension.to_string()]);
    r.row(vec!["hermitian".into(), v.hermitian.to_string()]);
    r.row(vec!["hermiticity_violation".into(), num(v.hermiticity_violation)]);
    r.row(vec!["degenerate".into(), v.degeneracy.is_degenerate().to_string()]);
    for group in v.degeneracy.degenerate_groups() {
        let ids: Vec<String> = group.iter().map(ToString::to_string).collect();
        r.row(vec!["degenerate_group".into(), ids.join(" ")]);
    }
    r.row(vec!["admissible".into(), v.admissible.to_string()]);
    Ok(r)
}

pub(crate) fn sample(n: usize, norm: f64, gap: f64, seed: u64) -> Result<SystemSpec> {
    if n == 0 {
        bail!("--dimension must be at least 1");
    }
    if !(gap >= 0.0 && gap.is_finite()) || !(norm >= 0.0 && norm.is_finite()) {
        bail!("--gap and --norm must be finite and non-negative");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Sorted uniform points on [-2, 2], spread apart by k * gap.
    let mut base: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
    base.sort_by(f64::total_cmp);
    let energies: Vec<f64> = base.iter().enumerate().map(|(k, &x)| x + k as f64 * gap).collect();
    let mut h = CMatrix::zeros(n, n);
    for i in 0..n {
        h[(i, i)] = Complex64::new(rng.random_range(-1.0..1.0), 0.0);
        for j in i + 1..n {
            let z = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
        }
    }
    let frob = h.norm();
    if frob > 0.0 {
        h *= Complex64::new(norm / frob, 0.0);
    }
    Ok(SystemSpec::new(energies, h))
}
