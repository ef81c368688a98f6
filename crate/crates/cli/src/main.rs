//! `twowell`: command-line front end to the two-well scaling library.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use twowell::construction2d::{
    construction_energy, construction_energy_with_residual, well_construction, FieldKind,
};
use twowell::experiment::{
    emit_geometry_plot, emit_plot, fit_rows, read_polylines, read_rows, sweep_lower, sweep_upper,
    write_polylines, write_rows, OperatorChoice, SweepConfig,
};
use twowell::fourier_bound::{
    alpha_for, key_estimate_report, slicing_check, spectral_energy, PhaseField,
};
use twowell::multiplier::{
    curl_basis_well, div_basis_well, predicted_order, vanishing_order_estimate, zero_set,
    MultiplierPoly,
};
use twowell::operators::{kernel_basis, HomogeneousOperator, VecSym};
use twowell::symtensor::MultiIndex;

#[derive(Parser)]
#[command(
    name = "twowell",
    version,
    about = "Scaling laws for two-well problems with higher-order compatibility"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the symbol matrix 𝒜(ξ) as CSV, or |𝒜(ξ)M|² for a basis well.
    Symbol(SymbolArgs),
    /// Nullspace of 𝒜(ξ): dimension and basis coordinates.
    Kernel(SymbolArgs),
    /// Vanishing order of the multiplier of a basis well, as CSV.
    Order(OrderArgs),
    /// Fourier-side energy and inequality checks on a phase-field file.
    Lower(LowerArgs),
    /// Energy of one upper-bound construction; optional raster and curves.
    Construct(ConstructArgs),
    /// ε sweep of the upper (and optionally lower) bound.
    Sweep(SweepArgs),
    /// Log–log slope fit of a sweep CSV.
    Fit(FitArgs),
    /// Scaling plot from a sweep CSV, or geometry plot from a polyline file.
    Plot(PlotArgs),
}

#[derive(Args)]
struct OpArgs {
    /// curl (Saint-Venant) or div.
    #[arg(long, default_value = "curl")]
    op: OperatorChoice,
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long, default_value_t = 1)]
    m: usize,
    /// Rows of the divergence operator.
    #[arg(long, default_value_t = 1)]
    k: usize,
}

impl OpArgs {
    fn operator(&self) -> HomogeneousOperator {
        match self.op {
            OperatorChoice::Curl => HomogeneousOperator::saint_venant(self.d, self.m),
            OperatorChoice::Divergence => HomogeneousOperator::divergence(self.d, self.m, self.k),
        }
    }
}

#[derive(Args)]
struct SymbolArgs {
    #[command(flatten)]
    op: OpArgs,
    /// Frequency, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    xi: Vec<f64>,
    /// Exponents of a basis well e^l, comma separated.
    #[arg(long, value_delimiter = ',')]
    well: Option<Vec<usize>>,
}

#[derive(Args)]
struct OrderArgs {
    #[command(flatten)]
    op: OpArgs,
    #[arg(long, value_delimiter = ',')]
    well: Vec<usize>,
    #[arg(long, default_value_t = 8)]
    ell_max: usize,
}

#[derive(Args)]
struct LowerArgs {
    /// Phase-field file in the TWPF binary format.
    input: PathBuf,
    #[arg(long, default_value = "curl")]
    op: OperatorChoice,
    #[arg(long, value_delimiter = ',')]
    well: Vec<usize>,
    #[arg(long, default_value_t = 1e-3)]
    eps: f64,
    #[arg(long, default_value_t = 0.5)]
    delta: f64,
    #[arg(long, value_delimiter = ',', default_value = "8,16,32,64")]
    eta: Vec<f64>,
}

#[derive(Args)]
struct ConstructArgs {
    #[arg(long, default_value = "curl")]
    op: OperatorChoice,
    #[arg(long, value_delimiter = ',', default_value = "1,0")]
    well: Vec<usize>,
    /// Coarse cells along x.
    #[arg(long, default_value_t = 8)]
    n: usize,
    #[arg(long, default_value_t = 0.5)]
    lambda: f64,
    #[arg(long, default_value_t = 1e-3)]
    eps: f64,
    #[arg(long, default_value_t = 64)]
    resolution: usize,
    /// Also measure the discrete residual on this many grid points per side.
    #[arg(long)]
    residual: Option<usize>,
    /// CSV report path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the rasterized f to this TWPF file.
    #[arg(long)]
    raster: Option<PathBuf>,
    #[arg(long, default_value_t = 1024)]
    grid: usize,
    /// Write interface curves to this polyline file.
    #[arg(long)]
    polylines: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// key = value config file; defaults apply when absent.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Also run the Fourier-side lower sweep.
    #[arg(long)]
    lower: bool,
    /// Write log–log plots next to the CSV (svg or png).
    #[arg(long)]
    plot: Option<String>,
}

#[derive(Args)]
struct FitArgs {
    input: PathBuf,
    /// Vanishing order L for the reference exponent.
    #[arg(long)]
    order: Option<usize>,
}

#[derive(Args)]
struct PlotArgs {
    input: PathBuf,
    output: PathBuf,
    #[arg(long)]
    order: Option<usize>,
    /// Treat the input as a polyline file.
    #[arg(long)]
    geometry: bool,
}

fn main() -> Result<()> {
    let r = run(Cli::parse().cmd);
    // A closed pipe (e.g. `| head`) is not a failure.
    if let Err(e) = &r {
        if e.downcast_ref::<io::Error>()
            .is_some_and(|e| e.kind() == io::ErrorKind::BrokenPipe)
        {
            return Ok(());
        }
    }
    r
}

fn run(cmd: Cmd) -> Result<()> {
    match cmd {
        Cmd::Symbol(a) => symbol(&a),
        Cmd::Kernel(a) => kernel(&a),
        Cmd::Order(a) => order(&a),
        Cmd::Lower(a) => lower(&a),
        Cmd::Construct(a) => construct(&a),
        Cmd::Sweep(a) => sweep(&a),
        Cmd::Fit(a) => fit(&a),
        Cmd::Plot(a) => plot(&a),
    }
}

fn basis_well(op: OperatorChoice, d: usize, k: usize, well: &[usize]) -> Result<VecSym> {
    if well.len() != d {
        bail!("well needs {d} exponents, got {}", well.len());
    }
    let idx = MultiIndex::new(well.to_vec());
    Ok(match op {
        OperatorChoice::Curl => curl_basis_well(&idx),
        OperatorChoice::Divergence => {
            let mut v = vec![0.0; k];
            v[0] = 1.0;
            div_basis_well(&v, &idx)
        }
    })
}

fn check_xi(xi: &[f64], d: usize) -> Result<()> {
    if xi.len() != d {
        bail!("ξ needs {d} entries, got {}", xi.len());
    }
    Ok(())
}

fn symbol(a: &SymbolArgs) -> Result<()> {
    let op = a.op.operator();
    check_xi(&a.xi, a.op.d)?;
    let mut out = io::stdout().lock();
    if let Some(well) = &a.well {
        let w = basis_well(a.op.op, a.op.d, a.op.k, well)?;
        writeln!(out, "norm_sq")?;
        writeln!(out, "{:.16e}", op.symbol_norm_sq(&a.xi, &w)?)?;
        return Ok(());
    }
    let mat = op.symbol_matrix(&a.xi)?;
    for r in 0..mat.nrows() {
        let row: Vec<String> = (0..mat.ncols())
            .map(|c| format!("{:.16e}", mat[(r, c)]))
            .collect();
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

fn kernel(a: &SymbolArgs) -> Result<()> {
    let op = a.op.operator();
    check_xi(&a.xi, a.op.d)?;
    let basis = kernel_basis(&op, &a.xi, 1e-10)?;
    let mut out = io::stdout().lock();
    writeln!(out, "# dim {}", basis.len())?;
    for b in &basis {
        let row: Vec<String> = b.coords().iter().map(|c| format!("{c:.16e}")).collect();
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

fn order(a: &OrderArgs) -> Result<()> {
    let op = a.op.operator();
    let w = basis_well(a.op.op, a.op.d, a.op.k, &a.well)?;
    let v = zero_set(&op, &w)?;
    let p = MultiplierPoly::new(op, w)?;
    let rep = vanishing_order_estimate(&p, &v, a.ell_max)?;
    let mut out = io::stdout().lock();
    writeln!(
        out,
        "# order {} predicted {}",
        rep.order,
        predicted_order(&op, &MultiIndex::new(a.well.clone()))
    )?;
    writeln!(out, "ell,layer,min_ratio")?;
    for r in &rep.rows {
        writeln!(out, "{},{},{:.16e}", r.ell, r.layer, r.min_ratio)?;
    }
    Ok(())
}

fn lower(a: &LowerArgs) -> Result<()> {
    let f = PhaseField::read_from(io::BufReader::new(
        File::open(&a.input).with_context(|| a.input.display().to_string())?,
    ))?;
    let d = f.dim();
    let m = a.well.iter().sum();
    let op = match a.op {
        OperatorChoice::Curl => HomogeneousOperator::saint_venant(d, m),
        OperatorChoice::Divergence => HomogeneousOperator::divergence(d, m, 1),
    };
    let w = basis_well(a.op, d, 1, &a.well)?;
    let v = zero_set(&op, &w)?;
    let l = predicted_order(&op, &MultiIndex::new(a.well.clone()));
    let e = spectral_energy(&f, &v, l, a.eps)?;
    let mut out = io::stdout().lock();
    if let Some(warn) = &e.warning {
        writeln!(out, "# warning: {warn}")?;
    }
    writeln!(out, "quantity,value")?;
    writeln!(out, "order,{l}")?;
    writeln!(out, "epsilon,{:.16e}", a.eps)?;
    writeln!(out, "E_el,{:.16e}", e.e_el)?;
    writeln!(out, "E_surf,{:.16e}", e.e_surf)?;
    writeln!(out, "E_total,{:.16e}", e.e_eps)?;
    writeln!(
        out,
        "alpha,{:.16e}",
        alpha_for(&v, f.omega_diameter(), a.delta)
    )?;
    for &eta in &a.eta {
        let k = key_estimate_report(&f, &v, l, eta, a.delta)?;
        writeln!(out, "key_i[eta={eta}],{}", k.part_i.holds())?;
        writeln!(out, "key_ii[eta={eta}],{}", k.part_ii.holds())?;
        writeln!(out, "eta_high_mass[eta={eta}],{:.16e}", k.eta_high_mass)?;
    }
    for s in 1..=d {
        let r = slicing_check(&f, s)?;
        writeln!(out, "slicing[s={s}],{}", r.pass)?;
    }
    Ok(())
}

fn field_kind(op: OperatorChoice) -> FieldKind {
    match op {
        OperatorChoice::Curl => FieldKind::Curl,
        OperatorChoice::Divergence => FieldKind::Divergence,
    }
}

fn construct(a: &ConstructArgs) -> Result<()> {
    let [l1, l2] = a.well[..] else {
        bail!("construct needs two exponents")
    };
    let c = well_construction(l1, l2, a.n, a.lambda, field_kind(a.op))?;
    let rep = match a.residual {
        Some(g) => construction_energy_with_residual(&c, a.eps, a.resolution, g)?,
        None => construction_energy(&c, a.eps, a.resolution)?,
    };
    let mut text =
        String::from("epsilon,N,E_el,E_surf,E_total,intended_defect,residual_relative\n");
    let res = rep
        .residual
        .as_ref()
        .map_or(String::new(), |r| format!("{:.16e}", r.relative));
    text.push_str(&format!(
        "{:.16e},{},{:.16e},{:.16e},{:.16e},{:.16e},{res}\n",
        rep.epsilon, a.n, rep.e_el, rep.e_surf, rep.e_eps, rep.intended_defect
    ));
    match &a.out {
        Some(p) => std::fs::write(p, text).with_context(|| p.display().to_string())?,
        None => print!("{text}"),
    }
    if let Some(p) = &a.raster {
        let f = c.rasterize(a.grid)?;
        f.write_to(BufWriter::new(
            File::create(p).with_context(|| p.display().to_string())?,
        ))?;
    }
    if let Some(p) = &a.polylines {
        let curves = c.polylines(64, 4096);
        write_polylines(
            &curves,
            BufWriter::new(File::create(p).with_context(|| p.display().to_string())?),
        )?;
    }
    Ok(())
}

fn write_csv(path: &Path, rows: &[twowell::experiment::SweepRow]) -> Result<()> {
    let file = File::create(path).with_context(|| path.display().to_string())?;
    write_rows(rows, BufWriter::new(file))?;
    Ok(())
}

fn sweep(a: &SweepArgs) -> Result<()> {
    let mut cfg = match &a.config {
        Some(p) => SweepConfig::load(p).with_context(|| p.display().to_string())?,
        None => SweepConfig::default(),
    };
    cfg.apply_env()?;
    std::fs::create_dir_all(&cfg.out_dir).with_context(|| cfg.out_dir.display().to_string())?;
    let order = cfg.order();
    let stem = format!("m{}_l{}{}", cfg.m, cfg.l.0, cfg.l.1);

    let upper = sweep_upper(&cfg)?;
    let path = cfg.out_dir.join(format!("upper_{stem}.csv"));
    write_csv(&path, &upper)?;
    let fit = fit_rows(&upper, Some(order))?;
    println!(
        "upper: slope {:.4} (reference {:.4}), R² {:.4} -> {}",
        fit.slope,
        fit.theoretical().unwrap_or(f64::NAN),
        fit.r2,
        path.display()
    );
    if let Some(ext) = &a.plot {
        emit_plot(
            &upper,
            &fit,
            &cfg.out_dir.join(format!("upper_{stem}.{ext}")),
        )?;
    }

    if a.lower {
        let low = sweep_lower(&cfg)?;
        let path = cfg.out_dir.join(format!("lower_{stem}.csv"));
        write_csv(&path, &low.rows)?;
        for s in &low.skipped {
            println!("skipped {s}");
        }
        let lfit = fit_rows(&low.rows, Some(low.order))?;
        println!(
            "lower: slope {:.4}, R² {:.4} -> {}",
            lfit.slope,
            lfit.r2,
            path.display()
        );
        println!("|upper - lower| = {:.4}", (fit.slope - lfit.slope).abs());
        if let Some(ext) = &a.plot {
            emit_plot(
                &low.rows,
                &lfit,
                &cfg.out_dir.join(format!("lower_{stem}.{ext}")),
            )?;
        }
    }
    Ok(())
}

fn load_rows(path: &Path) -> Result<Vec<twowell::experiment::SweepRow>> {
    Ok(read_rows(
        File::open(path).with_context(|| path.display().to_string())?,
    )?)
}

fn fit(a: &FitArgs) -> Result<()> {
    let rows = load_rows(&a.input)?;
    let f = fit_rows(&rows, a.order)?;
    println!("slope,intercept,r2,theoretical,curvature");
    let th = f
        .theoretical()
        .map_or(String::new(), |t| format!("{t:.16e}"));
    println!(
        "{:.16e},{:.16e},{:.16e},{th},{}",
        f.slope, f.intercept, f.r2, f.curvature
    );
    Ok(())
}

fn plot(a: &PlotArgs) -> Result<()> {
    if a.geometry {
        let curves =
            read_polylines(File::open(&a.input).with_context(|| a.input.display().to_string())?)?;
        emit_geometry_plot(&curves, &a.output)?;
    } else {
        let rows = load_rows(&a.input)?;
        let f = fit_rows(&rows, a.order)?;
        emit_plot(&rows, &f, &a.output)?;
    }
    Ok(())
}
