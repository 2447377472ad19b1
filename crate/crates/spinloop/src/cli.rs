//! `spinloop` command-line front end.
//!
//! Every subcommand builds a [`Report`]: a CSV table, a JSON document and a
//! few summary lines. The artifact goes to `--out` (or stdout); the summary
//! goes to stdout when writing to a file and to stderr otherwise, so piped
//! CSV stays clean. CSV files start with `#` comment lines naming the tool
//! version, subcommand, preset and every applied override.

use crate::format::{g6, RangeSpec};
use crate::isc::{clip_rate, lower_isc, sweep_lower, sweep_upper, upper_isc};
use crate::kinetics::{self, radiative_rate, steady_state_from, transient};
use crate::multiplets::{
    project_salcs, two_hole_multiplets, Configuration, Orbital, PointGroupC3v, SiteBasis, Spin,
};
use crate::presets::{load_preset_with, DefectPreset, PjtBlock};
use crate::spectral::{build_lineshape, ccd_crossing};
use crate::spinparams::{decontaminate, extract_de, reduce_soc, soc_fit, Exclusion, SocDataset, ZfsTensor};
use crate::vibronic::{solve, CoefficientTable, PartitionRule};
use crate::{Error, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Debug, Parser)]
#[command(name = "spinloop", version, about = "Photophysics pipeline for C3v spin-1 defects")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Bundled preset (pl1, plx1) or path to a preset JSON file.
    #[arg(long, global = true, default_value = "pl1")]
    pub preset: String,
    /// Override a preset field, e.g. `--set jt.f=80` (repeatable).
    #[arg(long = "set", global = true, value_name = "PATH=VALUE")]
    pub overrides: Vec<String>,
    /// Write the artifact here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
    /// Suppress the summary lines.
    #[arg(long, global = true)]
    pub quiet: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BasisChoice {
    Divacancy,
    Nv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Partition {
    Averaged,
    Parity,
}

impl From<Partition> for PartitionRule {
    fn from(p: Partition) -> Self {
        match p {
            Partition::Averaged => PartitionRule::OrientationAveraged,
            Partition::Parity => PartitionRule::ReflectionParity,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Branch {
    Upper,
    Lower,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Symmetry-adapted orbitals and two-hole multiplets.
    Salcs {
        #[arg(long, value_enum, default_value_t = BasisChoice::Divacancy)]
        basis: BasisChoice,
    },
    /// Solve the E⊗e problem; coefficient table and Ham factors.
    Djt {
        #[arg(long)]
        n_max: Option<usize>,
        #[arg(long, value_enum, default_value_t = Partition::Averaged)]
        partition: Partition,
    },
    /// Solve the lower-branch problem; primed coefficient table.
    Pjt {
        #[arg(long)]
        n_max: Option<usize>,
        /// Use the alternate lower-branch parameter set.
        #[arg(long)]
        alternate: bool,
    },
    /// Phonon-overlap lineshape on its grid.
    Lineshape {
        #[arg(long, value_enum, default_value_t = Branch::Upper)]
        branch: Branch,
    },
    /// Upper-branch ISC rates over a Δ grid (meV).
    IscUpper {
        #[arg(long, default_value = "0:400:5")]
        delta: RangeSpec,
    },
    /// Lower-branch ISC rates over a Σ grid (meV).
    IscLower {
        #[arg(long, default_value = "0:400:5")]
        sigma: RangeSpec,
        #[arg(long)]
        alternate: bool,
    },
    /// Finite-size SOC fit.
    SocFit {
        /// CSV with a_mult,b_mult,c_mult,lambda_z_GHz; defaults to the preset series.
        #[arg(long)]
        data: Option<PathBuf>,
        /// `auto`, `none`, or comma-separated 0-based row indices.
        #[arg(long, default_value = "auto")]
        exclude: String,
    },
    /// D and E from spin-polarized and contamination tensors.
    Zfs {
        #[arg(long)]
        dt: PathBuf,
        #[arg(long)]
        ds: PathBuf,
    },
    /// Radiative rate and lifetime from (n, E_ZPL, μ).
    RadRate,
    /// Five-level kinetics.
    Kinetics {
        #[arg(long, conflicts_with = "transient")]
        steady: bool,
        #[arg(long)]
        transient: bool,
        /// Time grid in ns for --transient.
        #[arg(long, default_value = "0:200:1")]
        t: RangeSpec,
        /// Initial n1..n5, comma separated.
        #[arg(long, default_value = "0,0,0.5,0.5,0")]
        initial: String,
    },
    /// ODMR contrast from the preset rates.
    Contrast,
    /// Configuration-coordinate crossing check.
    Ccd,
}

/// Tabular + structured output of one subcommand.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub json: Value,
    pub summary: Vec<String>,
}

impl Report {
    fn new(columns: &[&str]) -> Self {
        Report { columns: columns.iter().map(|s| s.to_string()).collect(), ..Default::default() }
    }

    fn push<I: IntoIterator<Item = String>>(&mut self, row: I) {
        self.rows.push(row.into_iter().collect());
    }

    pub fn csv(&self, header: &[String]) -> String {
        let mut s = String::new();
        for h in header {
            s.push_str("# ");
            s.push_str(h);
            s.push('\n');
        }
        s.push_str(&self.columns.join(","));
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.join(","));
            s.push('\n');
        }
        s
    }
}

struct Context {
    preset_name: String,
    overrides: Vec<String>,
    preset: Option<DefectPreset>,
    selector: String,
}

impl Context {
    fn preset(&mut self) -> Result<&DefectPreset> {
        if self.preset.is_none() {
            let p = load_preset_with(&self.selector, &self.overrides)?;
            self.preset_name = p.name.clone();
            self.preset = Some(p);
        }
        Ok(self.preset.as_ref().expect("loaded"))
    }
}

/// Run with process stdout/stderr; returns the exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_validation() {
                2
            } else {
                1
            }
        }
    }
}

fn subcommand_name(c: &Command) -> &'static str {
    match c {
        Command::Salcs { .. } => "salcs",
        Command::Djt { .. } => "djt",
        Command::Pjt { .. } => "pjt",
        Command::Lineshape { .. } => "lineshape",
        Command::IscUpper { .. } => "isc-upper",
        Command::IscLower { .. } => "isc-lower",
        Command::SocFit { .. } => "soc-fit",
        Command::Zfs { .. } => "zfs",
        Command::RadRate => "rad-rate",
        Command::Kinetics { .. } => "kinetics",
        Command::Contrast => "contrast",
        Command::Ccd => "ccd",
    }
}

fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let g = &cli.global;
    let mut ctx = Context { preset_name: g.preset.clone(), overrides: g.overrides.clone(), preset: None, selector: g.preset.clone() };
    let report = dispatch(&cli.command, &mut ctx)?;
    let name = subcommand_name(&cli.command);
    let mut header = vec![format!("spinloop {} {name}", env!("CARGO_PKG_VERSION"))];
    if ctx.preset.is_some() {
        header.push(format!("preset: {}", ctx.preset_name));
    }
    for o in &ctx.overrides {
        header.push(format!("override: {o}"));
    }
    let body = match g.format {
        OutputFormat::Csv => report.csv(&header),
        OutputFormat::Json => {
            let mut doc = json!({
                "tool": "spinloop",
                "version": env!("CARGO_PKG_VERSION"),
                "command": name,
                "overrides": ctx.overrides,
                "result": report.json,
            });
            if ctx.preset.is_some() {
                doc["preset"] = json!(ctx.preset_name);
            }
            serde_json::to_string_pretty(&doc).expect("json") + "\n"
        }
    };
    let io = |path: &str, source| Error::Io { path: path.to_string(), source };
    match &g.out {
        Some(path) => {
            std::fs::write(path, body).map_err(|e| io(&path.display().to_string(), e))?;
            if !g.quiet {
                for l in &report.summary {
                    writeln!(out, "{l}").map_err(|e| io("stdout", e))?;
                }
            }
        }
        None => {
            out.write_all(body.as_bytes()).map_err(|e| io("stdout", e))?;
            if !g.quiet {
                for l in &report.summary {
                    writeln!(err, "{l}").map_err(|e| io("stderr", e))?;
                }
            }
        }
    }
    Ok(())
}

fn dispatch(cmd: &Command, ctx: &mut Context) -> Result<Report> {
    match cmd {
        Command::Salcs { basis } => salcs(*basis),
        Command::Djt { n_max, partition } => djt(ctx.preset()?, *n_max, (*partition).into()),
        Command::Pjt { n_max, alternate } => pjt(ctx.preset()?, *n_max, *alternate),
        Command::Lineshape { branch } => lineshape(ctx.preset()?, *branch),
        Command::IscUpper { delta } => isc_upper(ctx.preset()?, delta),
        Command::IscLower { sigma, alternate } => isc_lower(ctx.preset()?, sigma, *alternate),
        Command::SocFit { data, exclude } => soc_fit_cmd(ctx.preset()?, data.as_deref(), exclude),
        Command::Zfs { dt, ds } => zfs(dt, ds),
        Command::RadRate => rad_rate(ctx.preset()?),
        Command::Kinetics { steady, transient, t, initial } => kinetics_cmd(ctx.preset()?, *steady || !*transient, t, initial),
        Command::Contrast => contrast(ctx.preset()?),
        Command::Ccd => ccd(ctx.preset()?),
    }
}

fn orbital_name(o: Orbital) -> &'static str {
    match o {
        Orbital::A => "a",
        Orbital::Ex => "ex",
        Orbital::Ey => "ey",
    }
}

fn spin_name(s: Spin) -> &'static str {
    match s {
        Spin::Up => "u",
        Spin::Down => "d",
    }
}

fn salcs(choice: BasisChoice) -> Result<Report> {
    let group = PointGroupC3v::new();
    let basis = match choice {
        BasisChoice::Divacancy => SiteBasis::divacancy(&group),
        BasisChoice::Nv => SiteBasis::nv(&group),
    };
    let salcs = project_salcs(&basis, &group)?;
    let mut cols = vec!["kind", "label", "irrep"];
    let names: Vec<&str> = basis.labels.iter().map(String::as_str).collect();
    cols.extend(names.iter().copied());
    let mut r = Report::new(&cols);
    for o in &salcs.orbitals {
        let mut row = vec!["salc".to_string(), o.label.clone(), format!("{:?}", o.irrep)];
        row.extend(o.coefficients.iter().map(|&c| g6(c)));
        r.push(row);
    }
    let mut multiplets = Vec::new();
    let mut count = 0;
    for config in [Configuration::EE, Configuration::AE, Configuration::AA] {
        for m in two_hole_multiplets(config) {
            for s in &m.states {
                count += 1;
                let expansion: Vec<String> = s
                    .terms
                    .iter()
                    .map(|t| {
                        format!(
                            "{}*{}{}.{}{}",
                            g6(t.coefficient),
                            orbital_name(t.orbitals.0),
                            orbital_name(t.orbitals.1),
                            spin_name(t.spins.0),
                            spin_name(t.spins.1)
                        )
                    })
                    .collect();
                let mut row = vec!["multiplet".to_string(), s.label.clone(), format!("{}{}", config, m.term)];
                row.push(expansion.join(" "));
                row.resize(cols.len(), String::new());
                r.push(row);
            }
            multiplets.push(serde_json::to_value(&m).expect("json"));
        }
    }
    r.json = json!({ "salcs": salcs, "multiplets": multiplets });
    let decomposition = basis.decomposition(&group);
    r.summary.push(format!(
        "{} orbitals: {}",
        basis.len(),
        decomposition.iter().map(|(k, v)| format!("{v}{k:?}")).collect::<Vec<_>>().join(" + ")
    ));
    r.summary.push(format!("{count} two-hole states"));
    Ok(r)
}

fn table_report(table: &CoefficientTable, with_g: bool) -> Report {
    let mut r = if with_g { Report::new(&["i", "c2", "d2", "f2", "g2"]) } else { Report::new(&["i", "c2", "d2", "f2"]) };
    let fmt = |x: f64| g6(if x.abs() < 1e-14 { 0.0 } else { x });
    for row in &table.rows {
        let mut v = vec![row.i.to_string(), fmt(row.c2), fmt(row.d2), fmt(row.f2)];
        if with_g {
            v.push(fmt(row.g2));
        }
        r.push(v);
    }
    let s = table.sums();
    let mut v = vec!["sum".to_string(), fmt(s.c2), fmt(s.d2), fmt(s.f2)];
    if with_g {
        v.push(fmt(s.g2));
    }
    r.push(v);
    r
}

fn djt(p: &DefectPreset, n_max: Option<usize>, partition: PartitionRule) -> Result<Report> {
    let mut problem = p.jt.problem().with_partition(partition);
    if let Some(n) = n_max {
        problem.n_max = n;
    }
    let sol = solve(&problem)?;
    let ham = sol.ham.expect("DJT solution");
    let mut r = table_report(&sol.table, false);
    let s = sol.table.sums();
    r.json = json!({
        "n_max": problem.n_max,
        "ground_energy_meV": sol.ground_energy(),
        "table": sol.table,
        "sums": s,
        "p": ham.p,
        "q": ham.q,
    });
    r.summary.push(format!("p={} q={}", crate::format::sig(ham.p, 3), crate::format::sig(ham.q, 3)));
    r.summary.push(format!("sum c2={:.3} d2={:.3} f2={:.3}  (N_max={})", s.c2, s.d2, s.f2, problem.n_max));
    Ok(r)
}

fn lower_block(p: &DefectPreset, alternate: bool) -> Result<(&PjtBlock, f64)> {
    if alternate {
        let alt = p.lower_alternate.as_ref().ok_or_else(|| Error::InvalidInput(format!("preset {} has no alternate lower-branch set", p.name)))?;
        Ok((&alt.pjt, alt.sigma.value))
    } else {
        Ok((&p.pjt, p.gaps.sigma.value))
    }
}

fn pjt(p: &DefectPreset, n_max: Option<usize>, alternate: bool) -> Result<Report> {
    let (block, _) = lower_block(p, alternate)?;
    let mut problem = block.problem();
    if let Some(n) = n_max {
        problem.n_max = n;
    }
    let sol = solve(&problem)?;
    let mut r = table_report(&sol.table, true);
    let s = sol.table.sums();
    let dominant = sol.table.rows[0].c2.max(sol.table.rows[0].f2);
    r.json = json!({
        "n_max": problem.n_max,
        "ground_energy_meV": sol.ground_energy(),
        "table": sol.table,
        "sums": s,
    });
    r.summary.push(format!("dominant i=0 weight={:.3}  sum d'2={:.4}  sum g'2={:.1e}", dominant, s.d2, s.g2));
    Ok(r)
}

fn lineshape(p: &DefectPreset, branch: Branch) -> Result<Report> {
    let block = match branch {
        Branch::Upper => &p.isc.upper_lineshape,
        Branch::Lower => &p.isc.lower_lineshape,
    };
    let model = block.model();
    let f = build_lineshape(&model)?;
    let mut r = Report::new(&["E_meV", "density_per_meV"]);
    for (e, v) in f.energies().zip(&f.values) {
        r.push([g6(e), g6(*v)]);
    }
    r.json = json!({ "model": model, "e0": f.e0, "de": f.de, "values": f.values, "normalization_residual": f.normalization_residual });
    r.summary.push(format!(
        "S={} hw={} meV sigma={} meV: {} points, first moment {:.2} meV",
        g6(model.modes[0].s),
        g6(model.modes[0].hw),
        g6(model.sigma),
        f.values.len(),
        f.first_moment()
    ));
    Ok(r)
}

fn isc_upper(p: &DefectPreset, range: &RangeSpec) -> Result<Report> {
    let table = solve(&p.jt.problem())?.table;
    let f = build_lineshape(&p.isc.upper_lineshape.model())?;
    let soc = p.isc.soc();
    let hw = p.jt.hw.value;
    let results = sweep_upper(&soc, &table, &f, hw, &range.values())?;
    let mut r = Report::new(&["gap_meV", "Gamma_A1_MHz", "Gamma_E12_MHz", "Gamma_A2_MHz", "ratio"]);
    for x in &results {
        r.push([g6(x.delta), g6(clip_rate(x.gamma_a1)), g6(clip_rate(x.gamma_e12)), g6(clip_rate(x.gamma_a2)), g6(x.ratio)]);
    }
    let at = upper_isc(&soc, &table, &f, hw, p.gaps.delta.value)?;
    r.json = json!({ "soc": soc, "sweep": results, "at_preset_gap": at });
    r.summary.push(format!(
        "Delta={} meV: Gamma_A1={:.2} Gamma_E12={:.2} Gamma_A2={:.2} MHz, ratio={:.3}, k45={:.2} MHz",
        g6(at.delta), at.gamma_a1, at.gamma_e12, at.gamma_a2, at.ratio, at.k45
    ));
    Ok(r)
}

fn isc_lower(p: &DefectPreset, range: &RangeSpec, alternate: bool) -> Result<Report> {
    let (block, gap) = lower_block(p, alternate)?;
    let table = solve(&block.problem())?.table;
    let l = build_lineshape(&p.isc.lower_lineshape.model())?;
    let soc = p.isc.soc();
    let (c2, hw) = (block.c2.value, block.hw.value);
    let results = sweep_lower(&soc, &table, c2, &l, hw, &range.values())?;
    let mut r = Report::new(&["gap_meV", "Gamma_z_MHz", "Gamma_perp_MHz", "Gamma_total_MHz", "ratio"]);
    for x in &results {
        r.push([g6(x.sigma), g6(clip_rate(x.gamma_z)), g6(clip_rate(x.gamma_perp)), g6(clip_rate(x.gamma_total)), g6(x.ratio)]);
    }
    let at = lower_isc(&soc, &table, c2, &l, hw, gap)?;
    r.json = json!({ "soc": soc, "sweep": results, "at_preset_gap": at });
    r.summary.push(format!(
        "Sigma={} meV: Gamma_z={:.3} Gamma_perp={:.3} MHz, ratio={:.2}",
        g6(at.sigma), at.gamma_z, at.gamma_perp, at.ratio
    ));
    Ok(r)
}

fn parse_exclusion(s: &str) -> Result<Exclusion> {
    match s.trim() {
        "auto" => Ok(Exclusion::Auto),
        "none" => Ok(Exclusion::None),
        list => list
            .split(',')
            .map(|x| x.trim().parse::<usize>().map_err(|_| Error::InvalidInput(format!("bad exclusion index '{x}'"))))
            .collect::<Result<Vec<_>>>()
            .map(Exclusion::Rows),
    }
}

fn soc_fit_cmd(p: &DefectPreset, data: Option<&Path>, exclude: &str) -> Result<Report> {
    let dataset = match data {
        Some(path) => SocDataset::read_csv(path)?,
        None => p.soc.dataset(),
    };
    let cell = p.soc.unit_cell();
    let fit = soc_fit(&dataset, &cell, &parse_exclusion(exclude)?)?;
    let mut r = Report::new(&["row", "a_mult", "b_mult", "c_mult", "x_ab", "y_c", "lambda_z_GHz", "model_GHz", "residual_GHz", "excluded"]);
    for (k, row) in dataset.rows.iter().enumerate() {
        let (x, y) = cell.coordinates(row);
        r.push([
            k.to_string(),
            g6(row.a_mult),
            g6(row.b_mult),
            g6(row.c_mult),
            g6(x),
            g6(y),
            g6(row.lambda_z),
            g6(fit.model.eval(x, y)),
            g6(fit.residuals[k]),
            fit.excluded.contains(&k).to_string(),
        ]);
    }
    let reduced = reduce_soc(fit.model.lambda_z0, p.soc.p.value)?;
    r.json = json!({
        "parameters": fit.model,
        "ssr": fit.ssr,
        "rms": fit.rms,
        "residuals": fit.residuals,
        "excluded": fit.excluded,
        "ssr_all_rows": fit.ssr_all_rows,
        "starts": fit.starts,
        "p": p.soc.p.value,
        "lambda_z_reduced_GHz": reduced,
    });
    r.summary.push(format!("lambda_z0={:.3} GHz (excluded rows {:?}), rms {:.3} GHz", fit.model.lambda_z0, fit.excluded, fit.rms));
    r.summary.push(format!("lambda_z = p*lambda_z0 = {:.3} GHz (p={})", reduced, g6(p.soc.p.value)));
    Ok(r)
}

fn zfs(dt: &Path, ds: &Path) -> Result<Report> {
    let t = ZfsTensor::read_json(dt)?;
    let s = ZfsTensor::read_json(ds)?;
    let d = decontaminate(&t, &s)?;
    let raw = extract_de(&t)?;
    let corrected = extract_de(&d)?;
    let mut r = Report::new(&["tensor", "unit", "D", "E", "trace"]);
    for (name, x) in [("spin_polarized", &raw), ("decontaminated", &corrected)] {
        r.push([name.to_string(), format!("{:?}", x.unit), g6(x.d), g6(x.e), g6(x.trace)]);
    }
    r.json = json!({ "spin_polarized": raw, "decontaminated": corrected, "tensor": d });
    r.summary.push(format!("D = {:.4} {:?}, E = {:.4} {:?} (raw D = {:.4})", corrected.d, corrected.unit, corrected.e, corrected.unit, raw.d));
    Ok(r)
}

fn rad_rate(p: &DefectPreset) -> Result<Report> {
    let inputs = p.radiative.inputs();
    let k = radiative_rate(&inputs)?;
    let tau = 1e3 / k;
    let mut r = Report::new(&["n", "E_ZPL_eV", "mu_D", "k_rad_MHz", "tau_rad_ns"]);
    r.push([g6(inputs.n), g6(inputs.e_zpl), g6(inputs.mu), g6(k), g6(tau)]);
    r.json = json!({ "inputs": inputs, "k_rad_MHz": k, "tau_rad_ns": tau });
    r.summary.push(format!("k_rad={k:.2} MHz, tau_rad={tau:.1} ns"));
    Ok(r)
}

fn parse_initial(s: &str) -> Result<[f64; 5]> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| Error::InvalidInput(format!("bad population '{x}'"))))
        .collect::<Result<_>>()?;
    v.try_into().map_err(|_| Error::InvalidInput("--initial needs five populations".into()))
}

fn kinetics_cmd(p: &DefectPreset, steady: bool, t: &RangeSpec, initial: &str) -> Result<Report> {
    let model = p.rates.model();
    let report = kinetics::report(&model)?;
    let mut r;
    if steady {
        let ss = steady_state_from(&model, &[0.5, 0.5, 0.0, 0.0, 0.0])?;
        r = Report::new(&["level", "population"]);
        for (k, n) in ss.populations.iter().enumerate() {
            let name = if k == kinetics::SINK { "sink".to_string() } else { (k + 1).to_string() };
            r.push([name, g6(*n)]);
        }
        r.json = json!({ "model": model, "populations": ss.populations, "PL_MHz": ss.pl_mhz, "report": report });
        r.summary.push(format!(
            "steady state: n1={:.4} n2={:.4} n3={:.4} n4={:.4} n5={:.4}, PL={:.4} MHz",
            ss.populations[0], ss.populations[1], ss.populations[2], ss.populations[3], ss.populations[4], ss.pl_mhz
        ));
    } else {
        let init = parse_initial(initial)?;
        let res = transient(&model, &init, &t.values())?;
        let tr = res.trajectory.expect("transient trajectory");
        r = Report::new(&["t_ns", "n1", "n2", "n3", "n4", "n5", "sink", "PL_MHz"]);
        for ((time, n), pl) in tr.t_ns.iter().zip(&tr.populations).zip(&tr.pl_mhz) {
            let mut row = vec![g6(*time)];
            row.extend(n.iter().map(|&x| g6(if x.abs() < 1e-15 { 0.0 } else { x })));
            row.push(g6(*pl));
            r.push(row);
        }
        r.json = json!({ "model": model, "trajectory": tr, "report": report });
        r.summary.push(format!("{} time points", tr.t_ns.len()));
    }
    r.summary.push(format!("tau_PL={:.2} ns eta_QY={:.2}% contrast={:.2}%", report.tau_pl_ns, 100.0 * report.eta_qy, 100.0 * report.contrast));
    Ok(r)
}

fn contrast(p: &DefectPreset) -> Result<Report> {
    let m = p.rates.model();
    let c = kinetics::contrast_of(&m)?;
    let k0 = m.k31 + m.k_ic + m.k35 + m.k_ir;
    let k1 = m.k42 + m.k_ic + m.k45 + m.k_ir;
    let mut r = Report::new(&["k0_MHz", "kpm1_MHz", "contrast"]);
    r.push([g6(k0), g6(k1), g6(c)]);
    r.json = json!({ "k0_MHz": k0, "kpm1_MHz": k1, "contrast": c });
    r.summary.push(format!("contrast = {:.2}%", 100.0 * c));
    Ok(r)
}

fn ccd(p: &DefectPreset) -> Result<Report> {
    let model = p.ccd.model();
    let rep = ccd_crossing(&model, p.ccd.q_range.value)?;
    let mut r = Report::new(&["Q", "E_ground_meV", "E_excited_meV"]);
    let qr = rep.q_range;
    for k in 0..=120 {
        let q = -qr + 2.0 * qr * k as f64 / 120.0;
        let (eg, ee) = model.energies(q);
        r.push([g6(q), g6(eg), g6(ee)]);
    }
    r.json = json!({ "model": model, "report": rep });
    let crossing = if rep.has_crossing() { format!("crossing at Q = {:?}", rep.crossings) } else { "no crossing".to_string() };
    r.summary.push(format!("{crossing} within |Q| <= {}; S = {:.2}", g6(qr), rep.huang_rhys));
    Ok(r)
}
