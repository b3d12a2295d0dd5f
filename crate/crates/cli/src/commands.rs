use crate::config::*;
use crate::output::{float, OutDir, Report, Status};
use crate::{Cli, Command};
use anyhow::{bail, Context, Result};
use dde_core::charroots::{
    build_exp_solutions, dde_residual_grid, linspace, scan_box, RootRecord, ScanBox, ScanConfig,
    SOLUTION_TOL,
};
use dde_core::closedform::{closed_solution, fib_op_poly, fib_op_poly_explicit};
use dde_core::quadrature::QuadratureSpec;
use dde_core::rational;
use dde_core::steps::{solve_ivp, InitialFunction, KnotRecord, Order, PiecewiseSolution, SolutionFile, StepsError};
use dde_core::table;
use dde_core::triangular::{assemble_triangular, Parity};
use dde_core::verify::{profile_csv, residual_profile, summarize};
use serde::Serialize;
use serde_json::{json, Value};
use std::path::PathBuf;

const SOLUTION_SCHEMA: &str = include_str!("../schemas/solution.schema.json");

/// Verification passes when both residual maxima and every knot value jump
/// are at or below this.
pub const VERIFY_TOL: f64 = 1e-9;

struct Globals {
    out: Option<PathBuf>,
    json: bool,
}

impl Globals {
    fn out_dir(&self) -> Result<OutDir> {
        let dir = self.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
        OutDir::create(&dir)
    }

    /// Resolved config, with the global settings folded in.
    fn config<T: Serialize>(&self, specific: &T, default_out: Option<&str>) -> Value {
        let mut v = serde_json::to_value(specific).expect("config serialises");
        let out = self
            .out
            .as_ref()
            .map(|p| p.display().to_string())
            .or(default_out.map(str::to_string));
        v["out"] = json!(out);
        v["json"] = json!(self.json);
        v
    }
}

/// Runs one command and returns its status and the rendered stdout.
pub fn run(cli: Cli) -> Result<(Status, String)> {
    let file = match &cli.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let globals = Globals {
        out: cli.out.clone().or(file.out.clone()),
        json: cli.json || file.json.unwrap_or(false),
    };
    let report = match cli.command {
        Command::SnTable {
            m_max,
            compare_paper,
        } => sn_table(
            &globals,
            SnTableConfig {
                m_max: m_max.or(file.m_max).unwrap_or(10),
                compare_paper: compare_paper || file.compare_paper.unwrap_or(false),
            },
        )?,
        Command::Solve {
            h,
            k,
            span,
            force,
            samples,
        } => {
            let h = h
                .or(file.h.clone())
                .ok_or_else(|| usage("solve needs an initial function h"))?;
            let k = k.or(file.k).unwrap_or(OrderArg::Named(Unbounded::Unbounded));
            let span = span.or(file.span).unwrap_or(match k {
                OrderArg::Finite(k) => k.max(1),
                OrderArg::Named(_) => 2,
            });
            solve(
                &globals,
                SolveConfig {
                    h,
                    k,
                    span,
                    force: force || file.force.unwrap_or(false),
                    samples: samples.or(file.samples).unwrap_or(DEFAULT_SAMPLES),
                },
            )?
        }
        Command::Roots { bx, grid } => {
            let bx = match bx {
                Some(v) => [v[0], v[1], v[2], v[3]],
                None => file.bx.unwrap_or(DEFAULT_BOX),
            };
            roots(
                &globals,
                RootsConfig {
                    bx,
                    grid: grid.or(file.grid).unwrap_or(DEFAULT_GRID),
                },
            )?
        }
        Command::Verify { file: path, points } => verify(
            &globals,
            VerifyConfig {
                file: path
                    .or(file.file.clone())
                    .ok_or_else(|| usage("verify needs a solution file"))?,
                points: points.or(file.points).unwrap_or(DEFAULT_POINTS),
            },
        )?,
        Command::Opcheck { n_max } => opcheck(
            &globals,
            OpcheckConfig {
                n_max: n_max.or(file.n_max).unwrap_or(15),
            },
        )?,
        Command::Triangular { parity, n } => triangular(
            &globals,
            TriangularConfig {
                parity: parity.or(file.parity).unwrap_or(Parity::Even),
                n: n.or(file.n).unwrap_or(8),
            },
        )?,
    };
    Ok((report.status, report.render(globals.json)))
}

fn sn_table(g: &Globals, cfg: SnTableConfig) -> Result<Report> {
    if !(1..=64).contains(&cfg.m_max) {
        return Err(usage(format!("m_max must be in 1..=64 (got {})", cfg.m_max)));
    }
    let mut r = Report::new("sn-table", g.config(&cfg, None));
    let rows = table::generate(cfg.m_max);
    for (m, p) in &rows {
        r.line(format!("S_{m} = {p}"));
    }
    let mut result = json!({
        "rows": rows.iter().map(|(m, p)| json!({ "m": m, "coeffs": p })).collect::<Vec<_>>(),
    });
    if cfg.compare_paper {
        let d = table::compare_with_printed(cfg.m_max);
        r.line(format!(
            "comparison with the reference table (m <= {}): {} discrepancies",
            cfg.m_max.min(10),
            d.len()
        ));
        for x in &d {
            r.line(format!(
                "  m={} x^{}: reference {}, computed {}",
                x.m, x.power, x.printed, x.computed
            ));
        }
        result["discrepancies"] = json!(d);
    }
    if g.out.is_some() {
        g.out_dir()?.write_json("sn_table.json", &result)?;
    }
    r.result = result;
    Ok(r)
}

#[derive(Serialize)]
struct DefectOut {
    order: usize,
    value: f64,
    exact: Option<String>,
    passed: bool,
}

fn solve(g: &Globals, cfg: SolveConfig) -> Result<Report> {
    if cfg.span == 0 {
        return Err(usage("span must be at least 1"));
    }
    let h = InitialFunction::parse(&cfg.h, cfg.k.order()).context("initial function")?;
    let outcome = match solve_ivp(&h, cfg.span, cfg.force) {
        Err(StepsError::Inadmissible(report)) => {
            bail!("initial function is not admissible ({report}); rerun with --force to extend anyway")
        }
        other => other?,
    };
    let mut r = Report::new("solve", g.config(&cfg, Some(DEFAULT_OUT)));
    let defects: Vec<DefectOut> = outcome
        .admissibility
        .defects
        .iter()
        .map(|d| DefectOut {
            order: d.order,
            value: d.value,
            exact: d.exact.as_ref().map(rational::to_text),
            passed: d.passed,
        })
        .collect();
    for d in &defects {
        r.line(format!(
            "defect order {}: {}{} {}",
            d.order,
            float(d.value),
            d.exact.as_ref().map(|e| format!(" (exact {e})")).unwrap_or_default(),
            if d.passed { "ok" } else { "FAIL" }
        ));
    }
    if outcome.forced {
        r.line("admissibility failed; extended anyway (--force)");
        r.status = Status::Forced;
    }
    let sol = &outcome.solution;
    for s in sol.segments() {
        r.line(format!("y_{} = {}", s.index(), s.formula()));
    }
    let knots: Vec<KnotRecord> = sol.knot_diagnostics()?.iter().map(KnotRecord::from).collect();
    for k in &knots {
        r.line(format!(
            "knot {}: value jump {}, derivative jump {}",
            k.knot,
            float(k.value_jump),
            float(k.derivative_jump)
        ));
    }
    let dir = g.out_dir()?;
    dir.write("solution.json", &(sol.to_json()? + "\n"))?;
    dir.write_json("knots.json", &knots)?;
    dir.write("samples.csv", &samples_csv(sol, cfg.samples)?)?;
    dir.write_json("run.json", &r.header())?;
    r.result = json!({
        "admissibility": defects,
        "forced": outcome.forced,
        "solution": sol.to_file()?,
        "knots": knots,
    });
    Ok(r)
}

fn samples_csv(sol: &PiecewiseSolution, n: usize) -> Result<String> {
    let (lo, hi) = sol.interval_f64();
    let mut out = String::from("x,y,dy\n");
    for x in linspace(lo, hi, n) {
        out.push_str(&format!(
            "{},{},{}\n",
            float(x),
            float(sol.eval(x)?),
            float(sol.eval_derivative(x)?)
        ));
    }
    Ok(out)
}

#[derive(Serialize)]
struct RootOut {
    #[serde(flatten)]
    root: RootRecord,
    a: f64,
    b: f64,
    real_part: String,
    imag_part: String,
    real_residual: f64,
    imag_residual: f64,
}

fn roots(g: &Globals, cfg: RootsConfig) -> Result<Report> {
    let [x0, x1, y0, y1] = cfg.bx;
    if cfg.bx.iter().any(|v| !v.is_finite()) || !(x0 < x1) || !(y0 < y1) {
        return Err(usage(format!(
            "box must satisfy re_min < re_max and im_min < im_max (got {x0} {x1} {y0} {y1})"
        )));
    }
    if cfg.grid < 2 {
        return Err(usage("grid must be at least 2"));
    }
    let mut r = Report::new("roots", g.config(&cfg, Some(DEFAULT_OUT)));
    let found = scan_box(
        ScanBox::new((x0, x1), (y0, y1)),
        ScanConfig {
            grid_n: cfg.grid,
            ..ScanConfig::default()
        },
    );
    let grid = linspace(-5.0, 5.0, 201);
    let mut out = Vec::new();
    for root in &found {
        let pair = build_exp_solutions(root);
        let re = dde_residual_grid(&pair.real_part, &grid)?.relative();
        let im = dde_residual_grid(&pair.imag_part, &grid)?.relative();
        r.line(format!(
            "w = ({}, {})  |sin w - w| = {}  solution residuals {} {}{}",
            float(root.w.re),
            float(root.w.im),
            float(root.residual),
            float(re),
            float(im),
            if re <= SOLUTION_TOL && im <= SOLUTION_TOL { "" } else { "  FAIL" }
        ));
        if re > SOLUTION_TOL || im > SOLUTION_TOL {
            r.status = Status::Failed;
        }
        out.push(RootOut {
            root: RootRecord::from(root),
            a: pair.a,
            b: pair.b,
            real_part: pair.real_part.to_string(),
            imag_part: pair.imag_part.to_string(),
            real_residual: re,
            imag_residual: im,
        });
    }
    r.line(format!("{} root(s)", out.len()));
    let dir = g.out_dir()?;
    dir.write_json("roots.json", &out)?;
    dir.write_json("run.json", &r.header())?;
    r.result = json!(out);
    Ok(r)
}

fn verify(g: &Globals, cfg: VerifyConfig) -> Result<Report> {
    let text = std::fs::read_to_string(&cfg.file)
        .with_context(|| format!("reading {}", cfg.file.display()))?;
    let doc: Value = serde_json::from_str(&text)
        .with_context(|| format!("{} is not valid JSON", cfg.file.display()))?;
    let schema: Value = serde_json::from_str(SOLUTION_SCHEMA).expect("bundled schema is JSON");
    let compiled = jsonschema::JSONSchema::compile(&schema).expect("bundled schema compiles");
    if let Err(errors) = compiled.validate(&doc) {
        let mut msgs: Vec<String> = errors
            .map(|e| {
                let at = e.instance_path.to_string();
                format!("at {}: {e}", if at.is_empty() { "/" } else { &at })
            })
            .collect();
        msgs.sort();
        bail!("schema violation in {}:\n  {}", cfg.file.display(), msgs.join("\n  "));
    }
    let file: SolutionFile = serde_json::from_value(doc)?;
    let sol = PiecewiseSolution::from_file(&file)?;
    let rows = residual_profile(&sol, cfg.points, &QuadratureSpec::default())?;
    let s = summarize(&rows);
    let max_jump = sol
        .knot_diagnostics()?
        .iter()
        .map(|k| k.value_jump.abs())
        .fold(0.0, f64::max);
    let mut r = Report::new("verify", g.config(&cfg, Some(DEFAULT_OUT)));
    let pass = s.max_dde <= VERIFY_TOL && s.max_integral <= VERIFY_TOL && max_jump <= VERIFY_TOL;
    r.line(format!("points: {}", s.points));
    r.line(format!("max |dde residual|: {}", float(s.max_dde)));
    r.line(format!(
        "max |integral residual|: {} at x = {}",
        float(s.max_integral),
        float(s.worst_x)
    ));
    r.line(format!("max |knot value jump|: {}", float(max_jump)));
    r.line(format!("verdict: {}", if pass { "pass" } else { "FAIL" }));
    if !pass {
        r.status = Status::Failed;
    }
    let dir = g.out_dir()?;
    dir.write("profile.csv", &profile_csv(&rows))?;
    dir.write_json("run.json", &r.header())?;
    r.result = json!({
        "points": s.points,
        "max_dde_residual": s.max_dde,
        "max_integral_residual": s.max_integral,
        "max_knot_jump": max_jump,
        "pass": pass,
    });
    Ok(r)
}

/// Initial functions for the closed-form versus stepwise comparison.
pub const BATTERY: [&str; 6] = [
    "x^2",
    "x^3",
    "x^4 - x",
    "x^5 + 2*x^2 - 1",
    "x^6 - 3*x^4 + x",
    "7*x^3 - x/4 + 1/2",
];

fn opcheck(g: &Globals, cfg: OpcheckConfig) -> Result<Report> {
    if cfg.n_max == 0 {
        return Err(usage("n_max must be at least 1"));
    }
    let mut r = Report::new("opcheck", g.config(&cfg, None));
    let mut items = Vec::new();
    for n in 1..=cfg.n_max {
        let (a, b) = (fib_op_poly(n), fib_op_poly_explicit(n));
        items.push((format!("G_{n} = {a}"), a == b));
    }
    for src in BATTERY {
        let h = InitialFunction::parse(src, Order::Unbounded)?;
        let step = solve_ivp(&h, 4, true)?.solution;
        let closed = closed_solution(&h, 4)?;
        for n in (-4..=4).filter(|n| *n != 0 && *n != -1) {
            let same = step.segment(n).and_then(|s| s.poly()) == closed.segment(n).and_then(|s| s.poly());
            items.push((format!("h = {src}, segment {n}: closed form = stepwise"), same));
        }
    }
    let failures = items.iter().filter(|(_, ok)| !ok).count();
    for (name, ok) in &items {
        r.line(format!("{} {name}", if *ok { "pass" } else { "FAIL" }));
    }
    r.line(format!("{} checks, {failures} failed", items.len()));
    if failures > 0 {
        r.status = Status::Failed;
    }
    r.result = json!(items
        .iter()
        .map(|(name, ok)| json!({ "check": name, "pass": ok }))
        .collect::<Vec<_>>());
    if g.out.is_some() {
        g.out_dir()?.write_json("opcheck.json", &r.result)?;
    }
    Ok(r)
}

fn triangular(g: &Globals, cfg: TriangularConfig) -> Result<Report> {
    let sys = assemble_triangular(cfg.parity, cfg.n).map_err(|e| usage(e.to_string()))?;
    let mut r = Report::new("triangular", g.config(&cfg, None));
    for row in &sys.rows {
        let terms: Vec<String> = row
            .coeffs
            .iter()
            .map(|(i, c)| format!("({}) a_{i}", rational::to_text(c)))
            .collect();
        r.line(format!("k={}: {} = 0", row.k, terms.join(" + ")));
    }
    r.result = serde_json::to_value(&sys)?;
    if g.out.is_some() {
        g.out_dir()?.write_json("triangular.json", &sys)?;
    }
    Ok(r)
}
