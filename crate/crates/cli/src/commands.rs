use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Serialize;
use transfer_entropy::discrete::{
    count_cells, count_cells_conditional, dof, plugin_te, DiscreteMarkov,
};
use transfer_entropy::simulator::{calibration_ensemble, simulate_toy, ToyChainParams};
use transfer_entropy::var::GaussianVar;
use transfer_entropy::{
    select_order, te_test_with_alpha, var_te, CategoricalSeries, ContinuousSeries, Criterion,
};

use crate::args::{
    CalibrateArgs, ChainArgs, CriterionArg, DataArgs, EstimateArgs, Format, ModelKind,
    SelectOrderArgs, SimulateArgs, TestArgs, Units,
};
use crate::config::{pick, switch, FileConfig};
use crate::ingest::{to_continuous, Table};

pub enum Data {
    Discrete {
        x: CategoricalSeries,
        y: CategoricalSeries,
        z: Option<CategoricalSeries>,
    },
    Var {
        x: ContinuousSeries,
        y: ContinuousSeries,
    },
}

impl Data {
    fn kind(&self) -> &'static str {
        match self {
            Data::Discrete { .. } => "discrete",
            Data::Var { .. } => "var",
        }
    }

    fn len(&self) -> usize {
        match self {
            Data::Discrete { x, .. } => x.values().len(),
            Data::Var { x, .. } => x.rows().count(),
        }
    }

    fn require_length(&self, k: usize) -> Result<()> {
        let n = self.len();
        if n < k + 2 {
            bail!(
                "series length {n} is too short for order {k} (need at least {})",
                k + 2
            );
        }
        Ok(())
    }
}

pub fn load(args: &DataArgs, config: &FileConfig) -> Result<Data> {
    let delimiter = pick(args.delimiter, config.delimiter, ',');
    let table = Table::read(&args.input, delimiter, switch(args.header, config.header))?;
    let x = table.columns(&pick(args.x.clone(), config.x.clone(), "0".into()))?;
    let y = table.columns(&pick(args.y.clone(), config.y.clone(), "1".into()))?;
    let z = match args.z.clone().or_else(|| config.z.clone()) {
        Some(spec) => Some(table.columns(&spec)?),
        None => None,
    };
    let bins = args.bins.or(config.bins);
    let single = x.len() == 1 && y.len() == 1 && z.as_ref().is_none_or(|z| z.len() == 1);
    let symbolic = x
        .iter()
        .chain(&y)
        .chain(z.iter().flatten())
        .all(|c| c.is_symbolic());
    let model = args
        .model
        .or(config.model)
        .unwrap_or(if bins.is_some() || (single && symbolic) {
            ModelKind::Discrete
        } else {
            ModelKind::Var
        });

    match model {
        ModelKind::Discrete => {
            if !single {
                bail!("the discrete model takes exactly one column per variable");
            }
            let series = |cols: &[crate::ingest::Column], alphabet: Option<usize>| match bins {
                Some(b) => cols[0].quantize(b),
                None => cols[0].to_symbols(alphabet),
            };
            if let Some(b) = bins {
                eprintln!(
                    "warning: quantizing into {b} equal-width bins; estimates depend on the binning choice"
                );
            }
            Ok(Data::Discrete {
                x: series(&x, args.alphabet_x.or(config.alphabet_x))?,
                y: series(&y, args.alphabet_y.or(config.alphabet_y))?,
                z: match &z {
                    Some(z) => Some(series(z, args.alphabet_z.or(config.alphabet_z))?),
                    None => None,
                },
            })
        }
        ModelKind::Var => {
            if z.is_some() {
                bail!("a conditioning column is only supported by the discrete model");
            }
            if bins.is_some() {
                bail!("--bins only applies to the discrete model");
            }
            let demean = switch(args.demean, config.demean);
            Ok(Data::Var {
                x: to_continuous(&x, demean)?,
                y: to_continuous(&y, demean)?,
            })
        }
    }
}

/// Point estimate in nats with what the χ² test needs.
struct Estimate {
    te_hat: f64,
    dof: u64,
    effective_samples: u64,
    unobserved_contexts: bool,
}

fn estimate_te(data: &Data, k: usize) -> Result<Estimate> {
    data.require_length(k)?;
    match data {
        Data::Discrete { x, y, z } => {
            let dist = match z {
                Some(z) => count_cells_conditional(x, y, z, k)?,
                None => count_cells(x, y, k)?,
            };
            let spec = dof(
                x.alphabet_size(),
                y.alphabet_size(),
                k,
                z.as_ref().map(CategoricalSeries::alphabet_size),
            )?;
            let unobserved = dist.has_unobserved_contexts();
            if unobserved {
                eprintln!(
                    "warning: some conditioning contexts never occur; the χ² approximation may be poor at this sample size"
                );
            }
            Ok(Estimate {
                te_hat: plugin_te(&dist),
                dof: spec.dof,
                effective_samples: dist.total(),
                unobserved_contexts: unobserved,
            })
        }
        Data::Var { x, y } => {
            let r = var_te(x, y, k)?;
            Ok(Estimate {
                te_hat: r.te_hat,
                dof: r.dof,
                effective_samples: r.effective_samples as u64,
                unobserved_contexts: false,
            })
        }
    }
}

#[derive(Debug, Serialize)]
pub struct EstimateReport {
    pub model: &'static str,
    pub order: usize,
    pub units: &'static str,
    pub te_hat: f64,
    /// 2(n−k)·T̂, always from the estimate in nats.
    pub statistic: f64,
    pub dof: u64,
    pub effective_samples: u64,
    pub unobserved_contexts: bool,
}

#[derive(Debug, Serialize)]
pub struct TestReport {
    pub model: &'static str,
    pub order: usize,
    pub units: &'static str,
    pub te_hat: f64,
    pub statistic: f64,
    pub dof: u64,
    pub effective_samples: u64,
    pub p_value: f64,
    pub ci_lower: f64,
    pub ci_upper: f64,
    pub confidence_level: f64,
    pub unobserved_contexts: bool,
}

#[derive(Debug, Serialize)]
pub struct OrderReport {
    pub model: &'static str,
    pub criterion: &'static str,
    pub k_max: usize,
    pub order: usize,
}

pub fn estimate(args: &EstimateArgs, config: &FileConfig) -> Result<EstimateReport> {
    let data = load(&args.data, config)?;
    let k = pick(args.order, config.order, 1);
    let units = pick(args.units, config.units, Units::Nats);
    let e = estimate_te(&data, k)?;
    Ok(EstimateReport {
        model: data.kind(),
        order: k,
        units: units.name(),
        te_hat: units.convert(e.te_hat),
        statistic: 2.0 * e.effective_samples as f64 * e.te_hat,
        dof: e.dof,
        effective_samples: e.effective_samples,
        unobserved_contexts: e.unobserved_contexts,
    })
}

pub fn test(args: &TestArgs, config: &FileConfig) -> Result<TestReport> {
    let a = &args.estimate;
    let data = load(&a.data, config)?;
    let k = pick(a.order, config.order, 1);
    let units = pick(a.units, config.units, Units::Nats);
    let alpha = pick(args.alpha, config.alpha, 0.05);
    let e = estimate_te(&data, k)?;
    let r = te_test_with_alpha(e.te_hat, e.effective_samples, e.dof, alpha)?;
    Ok(TestReport {
        model: data.kind(),
        order: k,
        units: units.name(),
        te_hat: units.convert(r.te_hat),
        statistic: r.statistic,
        dof: r.dof,
        effective_samples: r.effective_samples,
        p_value: r.p_value,
        ci_lower: units.convert(r.ci_lower),
        ci_upper: units.convert(r.ci_upper),
        confidence_level: r.confidence_level,
        unobserved_contexts: e.unobserved_contexts,
    })
}

pub fn select(args: &SelectOrderArgs, config: &FileConfig) -> Result<OrderReport> {
    let data = load(&args.data, config)?;
    let k_max = pick(args.k_max, config.k_max, 3);
    let (criterion, name) = match pick(args.criterion, config.criterion, CriterionArg::Bic) {
        CriterionArg::Aic => (Criterion::Aic, "aic"),
        CriterionArg::Bic => (Criterion::Bic, "bic"),
    };
    data.require_length(k_max)?;
    let order = match &data {
        Data::Discrete { z: Some(_), .. } => {
            bail!("order selection does not support a conditioning column")
        }
        Data::Discrete { x, y, z: None } => select_order::<DiscreteMarkov>(x, y, k_max, criterion)?,
        Data::Var { x, y } => select_order::<GaussianVar>(x, y, k_max, criterion)?,
    };
    Ok(OrderReport {
        model: data.kind(),
        criterion: name,
        k_max,
        order,
    })
}

fn chain_params(args: &ChainArgs, config: &FileConfig) -> Result<ToyChainParams> {
    Ok(ToyChainParams::new(
        pick(args.theta, config.theta, 0.4),
        pick(args.phi, config.phi, 0.6),
        pick(args.seed, config.seed, 0),
    )?)
}

pub fn simulate(args: &SimulateArgs, config: &FileConfig) -> Result<String> {
    let params = chain_params(&args.chain, config)?;
    let n = pick(args.chain.n, config.n, 4096);
    let (x, y) = simulate_toy(&params, n)?;
    let mut out = String::with_capacity(4 * n + 4);
    out.push_str("x,y\n");
    for (a, b) in x.values().iter().zip(y.values()) {
        let _ = writeln!(out, "{a},{b}");
    }
    Ok(out)
}

pub fn calibrate(args: &CalibrateArgs, config: &FileConfig, format: Format) -> Result<String> {
    let params = chain_params(&args.chain, config)?;
    let n = pick(args.chain.n, config.n, 2048);
    let reps = pick(args.reps, config.reps, 1000);
    let k = pick(args.order, config.order, 1);
    let report = calibration_ensemble(&params, n, k, reps)?;
    Ok(match format {
        Format::Json => report.to_json() + "\n",
        Format::Csv => report.to_csv(),
    })
}

pub fn render<T: Serialize>(value: &T, format: Format) -> Result<String> {
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(value)? + "\n"),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.serialize(value)?;
            Ok(String::from_utf8(w.into_inner()?)?)
        }
    }
}

pub fn emit(text: &str, output: Option<&Path>) -> Result<()> {
    match output {
        Some(path) => {
            std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
        }
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(stdout.flush()?)
        }
    }
}
