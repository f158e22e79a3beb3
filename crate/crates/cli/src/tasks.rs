//! One function per task. Each returns a report, its CSV tables and whether
//! every mathematical check passed.

use loewner_core::control::{
    hamiltonian_scan, pommerenke_check, pontryagin_check, support_screen, Family, HamiltonianScan, Maximizer,
};
use loewner_core::holomap::{
    check_class_membership, membership_radius, CVec, MapDescriptor, MembershipGrid, DEFAULT_MEMBERSHIP_TOL,
};
use loewner_core::loewner::{integrate_flow, flow_jet, scaled_limit, LimitOptions};
use loewner_core::variation::{
    default_ladder, first_order_term, scaled_first_order_term, verify_variation, Horizon, NeedleSpec,
    VerifyOptions, DEFAULT_DECAY_THRESHOLD,
};

use crate::error::CliError;
use crate::output::{complex_cells, complex_columns, jet_header, jet_rows, matrix_rows, num, Report, Table};
use crate::scenario::{points, Scenario, Task, TimeSpec};

pub struct Outcome {
    pub report: Report,
    pub tables: Vec<Table>,
    pub pass: bool,
}

pub fn run(task: Task, sc: &Scenario, opts: &LimitOptions) -> Result<Outcome, CliError> {
    match task {
        Task::Flow => flow(sc, opts),
        Task::Map => map(sc, opts),
        Task::Vary => vary(sc, opts),
        Task::Hamiltonian => hamiltonian(sc, opts),
        Task::Pontryagin => pontryagin(sc, opts),
        Task::Pommerenke => pommerenke(sc, opts),
        Task::Screen => screen(sc),
        Task::Membership => membership(sc),
    }
}

fn header(sc: &Scenario, task: Task, opts: &LimitOptions) -> Report {
    let mut r = Report::new();
    r.set("scenario", sc.name.as_str())
        .set("task", task.name())
        .set("dimension", sc.dimension)
        .set("abs_tol", opts.integrator.abs)
        .set("rel_tol", opts.integrator.rel)
        .set("max_steps", opts.integrator.max_steps)
        .set("limit_tol", opts.tol);
    r
}

fn value_tables(n: usize, tag: &str, rows: &[(String, usize, &CVec, &CVec)]) -> Table {
    let mut h = vec![tag.to_string(), "point".into()];
    h.extend(complex_columns("z", n));
    h.extend(complex_columns("w", n));
    let mut t = Table::new("values", &h);
    for (k, i, z, w) in rows {
        let mut row = vec![k.clone(), (i + 1).to_string()];
        row.extend(complex_cells(z));
        row.extend(complex_cells(w));
        t.push(row);
    }
    t
}

fn flow(sc: &Scenario, opts: &LimitOptions) -> Result<Outcome, CliError> {
    let spec = sc.section(&sc.flow, "flow")?;
    let g = sc.field()?;
    let n = sc.dimension;
    let zs = points(n, &spec.points)?;
    let mut report = header(sc, Task::Flow, opts);
    report.set("s", spec.s);
    let mut rows = Vec::new();
    let mut jac = Table::new("jacobians", &["t", "point", "row", "col", "re", "im"]);
    let mut jets = Table::new("jet", &jet_header(n, &["t"]));
    let mut results = Vec::new();
    for &t in &spec.times {
        let res = integrate_flow(&g, spec.s, t, &zs, &opts.integrator)?;
        let sec = format!("time.{}", results.len() + 1);
        report
            .put(&sec, "t", t)
            .put(&sec, "steps_taken", res.steps_taken)
            .put(&sec, "error_estimate", res.error_estimate);
        for (i, j) in res.jacobians.iter().enumerate() {
            for row in matrix_rows(&[num(t), (i + 1).to_string()], j) {
                jac.push(row);
            }
        }
        if let Some(d) = spec.degree {
            let jet = flow_jet(&g, spec.s, t, d, &opts.integrator)?;
            for row in jet_rows(&[num(t)], &jet) {
                jets.push(row);
            }
        }
        results.push((t, res));
    }
    for (t, res) in &results {
        for (i, (z, w)) in res.points.iter().zip(&res.values).enumerate() {
            rows.push((num(*t), i, z, w));
        }
    }
    let mut tables = vec![value_tables(n, "t", &rows), jac];
    if spec.degree.is_some() {
        tables.push(jets);
    }
    Ok(Outcome { report, tables, pass: true })
}

fn map(sc: &Scenario, opts: &LimitOptions) -> Result<Outcome, CliError> {
    let spec = sc.section(&sc.map, "map")?;
    let g = sc.field()?;
    let n = sc.dimension;
    let zs = points(n, &spec.points)?;
    let lim = scaled_limit(&g, spec.s, &zs, spec.degree, opts)?;
    let mut report = header(sc, Task::Map, opts);
    report
        .set("s", spec.s)
        .set("horizon", lim.horizon)
        .set("truncation_bound", lim.truncation_bound)
        .set("steps_taken", lim.steps_taken);
    let rows: Vec<_> = lim
        .points
        .iter()
        .zip(&lim.values)
        .enumerate()
        .map(|(i, (z, w))| (num(spec.s), i, z, w))
        .collect();
    let mut jac = Table::new("jacobians", &["s", "point", "row", "col", "re", "im"]);
    for (i, j) in lim.jacobians.iter().enumerate() {
        for row in matrix_rows(&[num(spec.s), (i + 1).to_string()], j) {
            jac.push(row);
        }
    }
    let mut tables = vec![value_tables(n, "s", &rows), jac];
    if let Some(jet) = &lim.jet {
        let mut t = Table::new("jet", &jet_header(n, &["s"]));
        for row in jet_rows(&[num(spec.s)], jet) {
            t.push(row);
        }
        tables.push(t);
    }
    Ok(Outcome { report, tables, pass: true })
}

fn horizon(t: &TimeSpec) -> Result<Horizon, CliError> {
    match t {
        TimeSpec::Finite(x) => Ok(Horizon::At(*x)),
        TimeSpec::Named(s) if s == "inf" => Ok(Horizon::Infinity),
        TimeSpec::Named(s) => Err(CliError::Input(format!("time {s:?} is neither a number nor \"inf\""))),
    }
}

fn horizon_cell(t: Horizon) -> String {
    match t {
        Horizon::At(x) => num(x),
        Horizon::Infinity => "inf".into(),
    }
}

fn vary(sc: &Scenario, opts: &LimitOptions) -> Result<Outcome, CliError> {
    let spec = sc.section(&sc.vary, "vary")?;
    let g = sc.field()?;
    let n = sc.dimension;
    let zs = points(n, &spec.points)?;
    let h = spec.control.build(n)?;
    let vopts = VerifyOptions {
        ladder: spec.ladder.clone().unwrap_or_else(default_ladder),
        scaled: spec.scaled,
        threshold: spec.threshold.unwrap_or(DEFAULT_DECAY_THRESHOLD),
        ..VerifyOptions::default()
    };
    let needle = NeedleSpec::new(spec.needle_time, h.clone(), vopts.ladder[0])?;
    let mut report = header(sc, Task::Vary, opts);
    report
        .set("s", spec.s)
        .set("needle_time", spec.needle_time)
        .set("scaled", spec.scaled)
        .set("terminal_tol", spec.terminal_tol);
    let mut ladder = Table::new("ladder", &["t", "eps", "residual", "ratio"]);
    let mut head = vec!["t".to_string(), "point".into()];
    head.extend(complex_columns("z", n));
    head.extend(complex_columns("alpha", n));
    let mut terms = Table::new("terms", &head);
    let mut pass = true;
    for (k, ts) in spec.times.iter().enumerate() {
        let t = horizon(ts)?;
        let rep = verify_variation(&g, spec.s, &needle, t, &zs, &vopts)?;
        let alpha = match (spec.scaled, t) {
            (true, _) => scaled_first_order_term(&g, spec.s, spec.needle_time, t, &h, &zs, &vopts.limit)?,
            (false, Horizon::At(x)) => first_order_term(&g, spec.s, spec.needle_time, x, &h, &zs, &vopts.limit)?,
            (false, Horizon::Infinity) => {
                return Err(CliError::Input("t = inf needs scaled = true".into()));
            }
        };
        let ok = rep.pass && rep.normalized_terminal <= spec.terminal_tol;
        pass &= ok;
        let sec = format!("time.{}", k + 1);
        report
            .put(&sec, "t", horizon_cell(t))
            .put(&sec, "pass", ok)
            .put(&sec, "ratios_pass", rep.pass)
            .put(&sec, "threshold", rep.threshold)
            .put(&sec, "predicted_norm", rep.predicted_norm)
            .put(&sec, "normalized_terminal", rep.normalized_terminal)
            .put(&sec, "decay_ratios", rep.decay_ratios.clone());
        if let Some(hz) = rep.horizon {
            report.put(&sec, "horizon", hz);
        }
        for (i, (eps, res)) in rep.ladder.iter().zip(&rep.residuals).enumerate() {
            let ratio = if i == 0 { String::new() } else { num(rep.decay_ratios[i - 1]) };
            ladder.push(vec![horizon_cell(t), num(*eps), num(*res), ratio]);
        }
        for (i, (z, a)) in zs.iter().zip(&alpha).enumerate() {
            let mut row = vec![horizon_cell(t), (i + 1).to_string()];
            row.extend(complex_cells(z));
            row.extend(complex_cells(a));
            terms.push(row);
        }
    }
    report.set("pass", pass);
    Ok(Outcome { report, tables: vec![ladder, terms], pass })
}

fn argmax_header(n: usize, extra: &[&str]) -> Vec<String> {
    let mut h: Vec<String> = ["t", "m"].iter().map(|s| s.to_string()).collect();
    h.extend(extra.iter().map(|s| s.to_string()));
    h.extend(["member".to_string(), "zeta_re".into(), "zeta_im".into()]);
    h.extend(complex_columns("u", n));
    h
}

fn argmax_cells(n: usize, m: &Maximizer) -> Vec<String> {
    match m {
        Maximizer::Explicit { index } => {
            let mut row = vec![(index + 1).to_string(), String::new(), String::new()];
            row.extend(std::iter::repeat_n(String::new(), 2 * n));
            row
        }
        Maximizer::Moebius { zeta, u } => {
            let mut row = vec![String::new(), num(zeta.re), num(zeta.im)];
            row.extend(complex_cells(u));
            row
        }
    }
}

fn witness(report: &mut Report, section: &str, m: &Maximizer) {
    match m {
        Maximizer::Explicit { index } => {
            report.put(section, "member", index + 1);
        }
        Maximizer::Moebius { zeta, u } => {
            report
                .put(section, "zeta", vec![zeta.re, zeta.im])
                .put(section, "u", u.iter().flat_map(|c| [c.re, c.im]).collect::<Vec<_>>());
        }
    }
}

fn family_label(family: &Family) -> &'static str {
    match family {
        Family::Explicit(_) => "explicit",
        Family::SliceMoebius { .. } => "slice_moebius",
    }
}

fn scan_report(report: &mut Report, family: &Family) {
    report
        .set("family", family_label(family))
        .set("m_meaning", "family-relative lower bound for the maximum over the class");
}

fn scan_table(n: usize, scan: &HamiltonianScan) -> Table {
    let mut t = Table::new("scan", &argmax_header(n, &[]));
    for ((tt, m), arg) in scan.t_grid.iter().zip(&scan.m_values).zip(&scan.maximizers) {
        let mut row = vec![num(*tt), num(*m)];
        row.extend(argmax_cells(n, arg));
        t.push(row);
    }
    t
}

fn hamiltonian(sc: &Scenario, opts: &LimitOptions) -> Result<Outcome, CliError> {
    let spec = sc.section(&sc.hamiltonian, "hamiltonian")?;
    let (g, l, family) = (sc.field()?, sc.functional()?, sc.family()?);
    let scan = hamiltonian_scan(&l, &g, &family, &spec.t_grid, opts)?;
    let mut report = header(sc, Task::Hamiltonian, opts);
    scan_report(&mut report, &family);
    report.set("constancy_deviation", scan.constancy_deviation);
    let pass = match spec.constancy_tol {
        Some(tol) => {
            report.set("constancy_tol", tol);
            scan.constancy_deviation <= tol
        }
        None => true,
    };
    report.set("pass", pass);
    Ok(Outcome {
        report,
        tables: vec![scan_table(sc.dimension, &scan)],
        pass,
    })
}

fn pontryagin(sc: &Scenario, opts: &LimitOptions) -> Result<Outcome, CliError> {
    let spec = sc.section(&sc.pontryagin, "pontryagin")?;
    let (g, l, family) = (sc.field()?, sc.functional()?, sc.family()?);
    let rep = pontryagin_check(&l, &g, &family, &spec.t_grid, spec.slack, opts)?;
    let n = sc.dimension;
    let mut report = header(sc, Task::Pontryagin, opts);
    scan_report(&mut report, &family);
    report
        .set("slack", rep.slack)
        .set("worst_violation", rep.worst_violation)
        .set("constancy_deviation", rep.scan.constancy_deviation)
        .set("pass", rep.pass)
        .set(
            "verdict",
            if rep.pass { "maximum principle holds on the grid" } else { "maximum principle violated" },
        );
    report.put("witness", "t", rep.worst_t);
    witness(&mut report, "witness", &rep.worst_maximizer);
    let mut t = Table::new("scan", &argmax_header(n, &["active", "violation"]));
    for i in 0..rep.scan.t_grid.len() {
        let mut row = vec![
            num(rep.scan.t_grid[i]),
            num(rep.scan.m_values[i]),
            num(rep.active_values[i]),
            num(rep.violations[i]),
        ];
        row.extend(argmax_cells(n, &rep.scan.maximizers[i]));
        t.push(row);
    }
    Ok(Outcome { report, tables: vec![t], pass: rep.pass })
}

fn pommerenke(sc: &Scenario, opts: &LimitOptions) -> Result<Outcome, CliError> {
    let spec = sc.section(&sc.pommerenke, "pommerenke")?;
    let (g, l, family) = (sc.field()?, sc.functional()?, sc.family()?);
    let rep = pommerenke_check(&l, &g, &family, spec.t_limit, spec.tol, opts)?;
    let mut report = header(sc, Task::Pommerenke, opts);
    scan_report(&mut report, &family);
    report
        .set("re_l_f", rep.re_l_f)
        .set("m_initial", rep.m_initial)
        .set("m_limit", rep.m_limit)
        .set("t_limit", rep.t_limit)
        .set("initial_gap", rep.initial_gap)
        .set("limit_gap", rep.limit_gap)
        .set("tol", rep.tol)
        .set("limit_pass", rep.pass);
    let mut pass = rep.pass;
    if let Some(tol) = spec.initial_tol {
        let ok = rep.initial_gap <= tol;
        report.set("initial_tol", tol).set("initial_pass", ok);
        pass &= ok;
    } else {
        report.set("initial_certified", false);
    }
    report.set("pass", pass);
    let mut t = Table::new("values", &["t", "m", "minus_re_l_f"]);
    for (tt, m) in [(0.0, rep.m_initial), (rep.t_limit, rep.m_limit)] {
        t.push(vec![num(tt), num(m), num(-rep.re_l_f)]);
    }
    Ok(Outcome { report, tables: vec![t], pass })
}

fn grid(fallback: MembershipGrid, radii: &Option<Vec<f64>>, directions: Option<usize>) -> MembershipGrid {
    MembershipGrid {
        radii: radii.clone().unwrap_or(fallback.radii),
        directions_per_radius: directions.unwrap_or(fallback.directions_per_radius),
    }
}

fn put_grid(report: &mut Report, g: &MembershipGrid) {
    report
        .put("grid", "radii", g.radii.clone())
        .put("grid", "directions_per_radius", g.directions_per_radius);
}

/// The screen is informational: its verdict never fails the run.
fn screen(sc: &Scenario) -> Result<Outcome, CliError> {
    let spec = sc.section(&sc.screen, "screen")?;
    let g = sc.field()?;
    let n = sc.dimension;
    let gr = grid(MembershipGrid::near_boundary(n), &spec.radii, spec.directions);
    let res = support_screen(&g, spec.time, &gr, spec.margin)?;
    let mut report = Report::new();
    report
        .set("scenario", sc.name.as_str())
        .set("task", Task::Screen.name())
        .set("dimension", n)
        .set("time", res.time)
        .set("sup_value", res.sup_value)
        .set("margin", res.margin)
        .set("fires", res.fires)
        .set(
            "verdict",
            if res.fires { "fires: not extremal beyond T" } else { "does not fire: inconclusive" },
        )
        .set("sup_point", res.sup_point.iter().flat_map(|c| [c.re, c.im]).collect::<Vec<_>>());
    put_grid(&mut report, &gr);
    let mut head = vec!["time".to_string(), "sup_value".into(), "margin".into(), "fires".into()];
    head.extend(complex_columns("z", n));
    let mut t = Table::new("screen", &head);
    let mut row = vec![num(res.time), num(res.sup_value), num(res.margin), res.fires.to_string()];
    row.extend(complex_cells(&res.sup_point));
    t.push(row);
    Ok(Outcome { report, tables: vec![t], pass: true })
}

fn membership(sc: &Scenario) -> Result<Outcome, CliError> {
    let spec = sc.membership.clone().unwrap_or_default();
    let n = sc.dimension;
    let maps: Vec<MapDescriptor> = spec
        .maps
        .as_ref()
        .unwrap_or(&sc.field.pieces)
        .iter()
        .map(|m| m.build(n))
        .collect::<Result<_, _>>()?;
    let gr = grid(MembershipGrid::default_for(n), &spec.radii, spec.directions);
    let tol = spec.tol.unwrap_or(DEFAULT_MEMBERSHIP_TOL);
    let mut report = Report::new();
    report
        .set("scenario", sc.name.as_str())
        .set("task", Task::Membership.name())
        .set("dimension", n)
        .set("tol", tol);
    put_grid(&mut report, &gr);
    let mut head = vec!["map".to_string(), "pass".into(), "worst_margin".into(), "normalization_ok".into()];
    head.extend(complex_columns("z", n));
    let mut t = Table::new("maps", &head);
    let mut pass = true;
    for (i, m) in maps.iter().enumerate() {
        let r = check_class_membership(m, &gr.radii, gr.directions_per_radius, tol)?;
        pass &= r.pass;
        let sec = format!("map.{}", i + 1);
        report
            .put(&sec, "pass", r.pass)
            .put(&sec, "worst_margin", r.worst_margin)
            .put(&sec, "normalization_ok", r.normalization_ok);
        let mut row = vec![(i + 1).to_string(), r.pass.to_string(), num(r.worst_margin), r.normalization_ok.to_string()];
        row.extend(complex_cells(&r.worst_point));
        t.push(row);
    }
    let mut tables = vec![t];
    if !spec.perturbations.is_empty() {
        let rtol = spec.radius_tol.unwrap_or(1e-6);
        let mut rt = Table::new("radii", &["perturbation", "delta"]);
        for (i, p) in spec.perturbations.iter().enumerate() {
            let jet = match p.build(n)? {
                MapDescriptor::PolyJet(j) => j,
                _ => return Err(CliError::Input("perturbations must have kind = \"poly_jet\"".into())),
            };
            let delta = membership_radius(&jet, rtol)?;
            let cell = match delta.value() {
                d if d.is_infinite() => "infinite".to_string(),
                d => num(d),
            };
            report.put(&format!("perturbation.{}", i + 1), "delta", cell.clone());
            rt.push(vec![(i + 1).to_string(), cell]);
        }
        tables.push(rt);
    }
    report.set("pass", pass);
    Ok(Outcome { report, tables, pass })
}
