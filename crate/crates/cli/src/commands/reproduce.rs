//! Regenerates the published digital-put tables and figure sweeps and checks
//! each table cell against the embedded reference values.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{ArgMatches, Args, ValueEnum};

use fourier_greeks::distributions::RngStream;
use fourier_greeks::fdgreeks::{fd_greeks, FdConfig};
use fourier_greeks::fourier::{fourier_greeks, CosExpansion, Method, Payoff};
use fourier_greeks::models::{MarketSetup, MeDigital, ModelSpec, VgParams};
use fourier_greeks::risk::{delta_gamma_var_on, full_mc_var_on, simulate_scenarios, ScenarioSet, VaRConfig};

use crate::args::{EngineArgs, FdArgs, MethodName, ModelArgs, ModelName, PayoffName};
use crate::commands::sweep::{grid, write_sweep, SweepArgs};
use crate::output::{ensure_parent, num, resolve, table, RunManifest};

pub const REFERENCE: &str = include_str!("../../data/reference_values.csv");

const STRIKE: f64 = 0.75;
const MATURITY: f64 = 1.0 / 12.0;
const FD_STEPS: [f64; 3] = [0.01, 0.02, 0.005];

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Table1,
    Table2,
    Figure1,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    #[arg(value_enum)]
    pub target: Target,
    #[arg(long, default_value_t = 100_000)]
    pub paths: usize,
    #[arg(long, default_value_t = 2024)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.01)]
    pub level: f64,
    #[arg(long, default_value_t = 1.0)]
    pub horizon_days: f64,
    /// Trading days per year.
    #[arg(long, default_value_t = 250.0)]
    pub day_count: f64,
    /// Figure sweep grid.
    #[arg(long, default_value_t = 0.60)]
    pub s0_min: f64,
    #[arg(long, default_value_t = 0.90)]
    pub s0_max: f64,
    #[arg(long, default_value_t = 61)]
    pub steps: usize,
    #[command(flatten)]
    pub engines: EngineArgs,
    #[command(flatten)]
    pub fd: FdArgs,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reference {
    pub table: String,
    pub quantity: String,
    pub column: String,
    pub value: f64,
    pub kind: String,
    pub tolerance: f64,
}

impl Reference {
    pub fn accepts(&self, x: f64) -> bool {
        match self.kind.as_str() {
            "abs" => (x - self.value).abs() <= self.tolerance,
            "rel" => (x - self.value).abs() <= self.tolerance * self.value.abs(),
            "order" => {
                x.signum() == self.value.signum()
                    && x != 0.0
                    && (x.abs().log10() - self.value.abs().log10()).abs() <= self.tolerance
            }
            _ => false,
        }
    }
}

pub fn references() -> Result<Vec<Reference>> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(REFERENCE.as_bytes());
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let field = |i: usize| rec.get(i).unwrap_or("").trim().to_string();
        let kind = field(4);
        if !matches!(kind.as_str(), "abs" | "rel" | "order") {
            bail!("unknown tolerance kind `{kind}`");
        }
        out.push(Reference {
            table: field(0),
            quantity: field(1),
            column: field(2),
            value: field(3).parse()?,
            kind,
            tolerance: field(5).parse()?,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub quantity: &'static str,
    pub column: String,
    pub value: Option<f64>,
}

fn me_model() -> ModelSpec<f64> {
    ModelSpec::me(1.0, 2.0, MATURITY, 0.0).expect("reference ME parameters are valid")
}

fn vg_model() -> ModelSpec<f64> {
    let p = VgParams::new(0.13, 0.4, 0.0).expect("reference VG parameters are valid");
    ModelSpec::vg(p, MATURITY, 0.0).expect("reference VG parameters are valid")
}

/// Cells of one table: price/delta/gamma/Delta-Gamma VaR per column, plus full MC VaR.
pub fn table_cells(args: &ReproduceArgs, model: &ModelSpec<f64>, s0: f64, analytic: bool) -> Result<Vec<Cell>> {
    let payoff = Payoff::DigitalPut;
    let engines = args.engines.engines(payoff);
    let mk = MarketSetup::new(s0, STRIKE)?;
    let base = Method::from(args.fd.fd_base);
    let base_price = |s: f64| -> fourier_greeks::Result<f64> {
        let m = MarketSetup::new(s, STRIKE)?;
        match base {
            Method::Analytic => Ok(MeDigital::new(model, STRIKE)?.price(s)),
            other => Ok(fourier_greeks(model, &m, payoff, other, &engines)?[0]),
        }
    };

    let mut columns: Vec<(String, [f64; 3], bool)> = Vec::new();
    if analytic {
        let d = MeDigital::new(model, STRIKE)?;
        columns.push(("analytic".into(), [d.price(s0), d.delta(s0)?, d.gamma(s0)?], true));
    }
    for h in FD_STEPS {
        let g = fd_greeks(base_price, s0, &FdConfig::with_step(h)?)?;
        columns.push((format!("fd-h{h}"), g, false));
    }
    for m in Method::FOURIER {
        columns.push((m.name().into(), fourier_greeks(model, &mk, payoff, m, &engines)?, true));
    }

    let cfg = VaRConfig {
        level: args.level,
        horizon: args.horizon_days / args.day_count,
        paths: args.paths,
        rng: RngStream::new(args.seed, 0),
    };
    let scenarios: ScenarioSet<f64> = simulate_scenarios(model, s0, &cfg)?;

    let mut cells = Vec::new();
    for (col, [p, d, g], has_price) in &columns {
        cells.push(Cell { quantity: "price", column: col.clone(), value: has_price.then_some(*p) });
        cells.push(Cell { quantity: "delta", column: col.clone(), value: Some(*d) });
        cells.push(Cell { quantity: "gamma", column: col.clone(), value: Some(*g) });
    }
    for (col, [_, d, g], _) in &columns {
        let var = delta_gamma_var_on(&scenarios, *d, *g, cfg.level)?.var;
        cells.push(Cell { quantity: "dg-var", column: col.clone(), value: Some(var) });
    }
    let full = if analytic {
        full_mc_var_on(&scenarios, &MeDigital::new(model, STRIKE)?, cfg.level)?
    } else {
        let cos = CosExpansion::new(model, &mk, payoff, &engines.cos.clone().unwrap_or_default())?;
        full_mc_var_on(&scenarios, &cos, cfg.level)?
    };
    cells.push(Cell { quantity: "full-mc-var", column: "full-mc".into(), value: Some(full.var) });
    Ok(cells)
}

fn write_table(path: &Path, cells: &[Cell]) -> Result<Vec<String>> {
    let mut columns: Vec<String> = Vec::new();
    for c in cells.iter().filter(|c| c.quantity != "full-mc-var") {
        if !columns.contains(&c.column) {
            columns.push(c.column.clone());
        }
    }
    ensure_parent(path)?;
    let mut w = csv::Writer::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    let mut header = vec!["quantity".to_string()];
    header.extend(columns.iter().cloned());
    w.write_record(&header)?;
    for q in ["price", "delta", "gamma", "dg-var"] {
        let mut row = vec![q.to_string()];
        for col in &columns {
            let v = cells.iter().find(|c| c.quantity == q && &c.column == col).and_then(|c| c.value);
            row.push(v.map(|v| v.to_string()).unwrap_or_default());
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(columns)
}

/// Writes the comparison file and returns (rows for display, passed, total).
fn compare(path: &Path, table_id: &str, cells: &[Cell]) -> Result<(Vec<Vec<String>>, usize, usize)> {
    let refs: Vec<Reference> = references()?.into_iter().filter(|r| r.table == table_id).collect();
    ensure_parent(path)?;
    let mut w = csv::Writer::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    w.write_record(["table", "quantity", "column", "computed", "reference", "kind", "tolerance", "pass"])?;
    let mut shown = Vec::new();
    let mut passed = 0;
    for r in &refs {
        let computed = cells
            .iter()
            .find(|c| c.quantity == r.quantity && c.column == r.column)
            .and_then(|c| c.value);
        let ok = computed.is_some_and(|x| r.accepts(x));
        passed += usize::from(ok);
        let comp = computed.map(|v| v.to_string()).unwrap_or_default();
        w.write_record([
            r.table.as_str(),
            &r.quantity,
            &r.column,
            &comp,
            &r.value.to_string(),
            &r.kind,
            &r.tolerance.to_string(),
            if ok { "pass" } else { "fail" },
        ])?;
        shown.push(vec![
            r.quantity.clone(),
            r.column.clone(),
            computed.map(num).unwrap_or_else(|| "-".into()),
            r.value.to_string(),
            format!("{} {}", r.kind, r.tolerance),
            if ok { "pass" } else { "FAIL" }.into(),
        ]);
    }
    w.flush()?;
    Ok((shown, passed, refs.len()))
}

pub fn run(args: &ReproduceArgs, out_dir: &Path, argv: &[OsString], matches: &ArgMatches) -> Result<()> {
    let manifest = RunManifest::new(argv, matches, Some(args.seed));
    match args.target {
        Target::Table1 | Target::Table2 => {
            let (id, model, s0, analytic) = match args.target {
                Target::Table1 => ("table1", me_model(), 0.75, true),
                _ => ("table2", vg_model(), 0.65, false),
            };
            let cells = table_cells(args, &model, s0, analytic)?;
            let table_path = resolve(out_dir, Path::new(&format!("{id}.csv")));
            let columns = write_table(&table_path, &cells)?;
            manifest.write_beside(&table_path)?;
            let cmp_path = resolve(out_dir, Path::new(&format!("{id}_comparison.csv")));
            let (rows, passed, total) = compare(&cmp_path, id, &cells)?;
            manifest.write_beside(&cmp_path)?;

            let mut grid_rows = Vec::new();
            for q in ["price", "delta", "gamma", "dg-var"] {
                let mut row = vec![q.to_string()];
                for col in &columns {
                    let v = cells.iter().find(|c| c.quantity == q && &c.column == col).and_then(|c| c.value);
                    row.push(v.map(num).unwrap_or_else(|| "/".into()));
                }
                grid_rows.push(row);
            }
            let mut header = vec!["quantity"];
            header.extend(columns.iter().map(String::as_str));
            println!("{id}: {} digital put, S0 = {s0}", model.name());
            print!("{}", table(&header, &grid_rows));
            if let Some(full) = cells.iter().find(|c| c.quantity == "full-mc-var").and_then(|c| c.value) {
                println!("full Monte Carlo VaR: {}", num(full));
            }
            println!();
            print!("{}", table(&["quantity", "column", "computed", "reference", "tolerance", "check"], &rows));
            println!("{passed}/{total} cells within tolerance");
            println!("wrote {} and {}", table_path.display(), cmp_path.display());
        }
        Target::Figure1 => {
            for (name, model_name) in [("me", ModelName::Me), ("vg", ModelName::Vg)] {
                let sweep = SweepArgs {
                    model: ModelArgs {
                        model: model_name,
                        eta: 1.0,
                        lambda: 2.0,
                        sigma: 0.13,
                        nu: 0.4,
                        theta: 0.0,
                        maturity: MATURITY,
                        rate: 0.0,
                    },
                    strike: STRIKE,
                    payoff: vec![PayoffName::Call, PayoffName::DigitalPut],
                    method: vec![MethodName::Fd, MethodName::CarrMadan, MethodName::Cos, MethodName::Lewis],
                    s0_min: args.s0_min,
                    s0_max: args.s0_max,
                    steps: args.steps,
                    output: PathBuf::from(format!("figure1_{name}.csv")),
                    engines: args.engines.clone(),
                    fd: args.fd.clone(),
                };
                let model = sweep.model.spec()?;
                let spots = grid(sweep.s0_min, sweep.s0_max, sweep.steps)?;
                let path = resolve(out_dir, &sweep.output);
                let rows = write_sweep(&path, &model, &sweep, &spots)?;
                manifest.write_beside(&path)?;
                println!("wrote {rows} rows to {}", path.display());
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedded_references_parse() {
        let refs = references().unwrap();
        assert_eq!(refs.iter().filter(|r| r.table == "table1").count(), 26);
        assert_eq!(refs.iter().filter(|r| r.table == "table2").count(), 22);
        assert!(refs.iter().all(|r| r.tolerance > 0.0));
    }

    #[test]
    fn tolerance_kinds() {
        let r = |kind: &str, value, tolerance| Reference {
            table: "t".into(),
            quantity: "q".into(),
            column: "c".into(),
            value,
            kind: kind.into(),
            tolerance,
        };
        assert!(r("abs", -2.10, 0.005).accepts(-2.0955));
        assert!(!r("abs", -2.10, 0.005).accepts(-2.09));
        assert!(r("rel", 36.98, 0.2).accepts(37.06));
        assert!(!r("rel", 38.54, 0.2).accepts(1.2));
        assert!(r("order", 1347.08, 1.0).accepts(1314.7));
        assert!(!r("order", 217.87, 1.0).accepts(-61506.9));
        assert!(!r("order", 1e-6, 1.0).accepts(0.0));
    }
}
