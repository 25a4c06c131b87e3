//! Command-line surface of the substructuring workspace.
//!
//! Every subcommand wraps one library operation; the `pipeline` subcommand
//! runs a declarative chain of them. Exit code 0 means all tolerances
//! passed; 1 means a comparison exceeded its tolerance; 2 means an error.

mod pipeline;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use substruct::coupling::{build_bc, couple_relaxed, couple_rigid, decouple_lm};
use substruct::frf::{FrequencyGrid, FrfQuantity};
use substruct::invsub::{is_identify_ce, IsOptions, IsSelection};
use substruct::io::{self, LoadedModel};
use substruct::lumped::{ResidueSpec, DEFAULT_EPSILON};
use substruct::model::OutputKind;
use substruct::primal::{localization_from_bc, primal_assemble, primal_disassemble};
use substruct::reduction::{build_bt_relaxed, build_bt_rigid, reduce_manual_relaxed, reduce_with_lt, to_coupling_form};
use substruct::StateSpaceModel;
use substruct_oracle as oracle;

#[derive(Parser)]
#[command(
    name = "substruct",
    about = "State-space dynamic substructuring: coupling, identification, reduction",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Displacement,
    Velocity,
    Acceleration,
    /// Inverted (force-output) construction, valid for massless systems.
    ApparentMass,
}

#[derive(Clone, Copy, ValueEnum)]
enum CoupleMethodArg {
    Rigid,
    Relaxed,
    Primal,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReduceArg {
    None,
    Lt,
    Manual,
}

#[derive(Clone, Copy, ValueEnum)]
enum DecoupleMethodArg {
    Primal,
    Lm,
}

#[derive(Clone, Copy, ValueEnum)]
enum QuantityArg {
    Receptance,
    Mobility,
    Accelerance,
    DynamicStiffness,
    MechanicalImpedance,
    ApparentMass,
}

impl From<QuantityArg> for FrfQuantity {
    fn from(q: QuantityArg) -> Self {
        match q {
            QuantityArg::Receptance => FrfQuantity::Receptance,
            QuantityArg::Mobility => FrfQuantity::Mobility,
            QuantityArg::Accelerance => FrfQuantity::Accelerance,
            QuantityArg::DynamicStiffness => FrfQuantity::DynamicStiffness,
            QuantityArg::MechanicalImpedance => FrfQuantity::MechanicalImpedance,
            QuantityArg::ApparentMass => FrfQuantity::ApparentMass,
        }
    }
}

#[derive(Args)]
struct GridArgs {
    /// Lowest frequency in Hz.
    #[arg(long, default_value_t = 0.5)]
    fmin: f64,
    /// Highest frequency in Hz.
    #[arg(long, default_value_t = 50.0)]
    fmax: f64,
    /// Number of linearly spaced lines.
    #[arg(long, default_value_t = 1024)]
    lines: usize,
}

impl GridArgs {
    fn to_grid(&self) -> Result<FrequencyGrid<f64>> {
        Ok(FrequencyGrid::linear_hz(self.fmin, self.fmax, self.lines)?)
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a state-space model from a lumped-system file.
    BuildModel {
        /// Lumped-system JSON file.
        input: PathBuf,
        #[arg(long, value_enum)]
        kind: KindArg,
        /// Residue mass for the apparent-mass construction.
        #[arg(long)]
        epsilon: Option<f64>,
        /// Transform the built model into coupling form.
        #[arg(long)]
        coupling_form: bool,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Evaluate a model's FRF on a linear grid and write CSV.
    Frf {
        input: PathBuf,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Invert a model (outputs and inputs swap roles).
    Invert {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Negative form: output and feed-through matrices times -1.
    Negate {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Differentiate the outputs once (or twice with --times 2).
    Differentiate {
        input: PathBuf,
        #[arg(long, default_value_t = 1)]
        times: u32,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Couple component models.
    Couple {
        #[arg(long, value_enum)]
        method: CoupleMethodArg,
        /// Component model files (inverted models for --method primal).
        #[arg(long, num_args = 1.., required = true)]
        components: Vec<PathBuf>,
        /// Connecting-element model files (relaxed coupling only).
        #[arg(long, num_args = 0..)]
        ces: Vec<PathBuf>,
        /// Connection pairs as dof_a:dof_b (qualify as structure/name when
        /// ambiguous).
        #[arg(long, num_args = 1.., value_parser = parse_pair)]
        pairs: Vec<(String, String)>,
        #[arg(long, default_value_t = 1)]
        phi: i32,
        #[arg(long, value_enum, default_value_t = ReduceArg::None)]
        reduce: ReduceArg,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Remove substructures from an assembly model.
    Decouple {
        #[arg(long, value_enum)]
        method: DecoupleMethodArg,
        /// Assembly model file (inverted for --method primal, accelerance
        /// for --method lm).
        #[arg(long)]
        assembly: PathBuf,
        /// Models to remove.
        #[arg(long, num_args = 1.., required = true)]
        remove: Vec<PathBuf>,
        /// Pairs assembly_dof:removed_dof.
        #[arg(long, num_args = 1.., value_parser = parse_pair)]
        pairs: Vec<(String, String)>,
        #[arg(long, default_value_t = 1)]
        phi: i32,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Identify a connecting element in situ from an assembly model.
    Invsub {
        /// Displacement state-space model file, or a lumped-system file
        /// (built as a displacement model first).
        input: PathBuf,
        /// Retained output DOFs (side 1).
        #[arg(long, num_args = 1.., required = true)]
        side1: Vec<String>,
        /// Retained input DOFs (side 2).
        #[arg(long, num_args = 1.., required = true)]
        side2: Vec<String>,
        /// Residue mass added before the final inversion.
        #[arg(long, default_value_t = DEFAULT_EPSILON)]
        epsilon: f64,
        /// Transform the assembly into coupling form first.
        #[arg(long)]
        coupling_form: bool,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Perturb an FRF CSV with reproducible Gaussian noise.
    Noise {
        input: PathBuf,
        #[arg(long)]
        sigma: f64,
        #[arg(long)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = QuantityArg::Accelerance)]
        quantity: QuantityArg,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Compare two FRF CSV files; exit code 0 iff within tolerance.
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = QuantityArg::Accelerance)]
        quantity: QuantityArg,
    },
    /// Run a pipeline configuration; exit code 0 iff every tolerance passes.
    Pipeline { config: PathBuf },
}

fn parse_pair(s: &str) -> Result<(String, String), String> {
    s.split_once(':')
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .ok_or_else(|| format!("expected dof_a:dof_b, got '{s}'"))
}

fn load_state_space(path: &PathBuf) -> Result<StateSpaceModel<f64>> {
    match io::load_model(path)? {
        LoadedModel::StateSpace(m) => Ok(m),
        LoadedModel::Lumped(_) => bail!(
            "{} is a lumped system; build a model first (build-model)",
            path.display()
        ),
    }
}

fn init_thread_pool() {
    if let Ok(v) = std::env::var("SUBSTRUCT_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            if n > 0 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

fn main() -> ExitCode {
    init_thread_pool();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.cmd {
        Cmd::BuildModel {
            input,
            kind,
            epsilon,
            coupling_form,
            output,
        } => {
            let LoadedModel::Lumped(sys) = io::load_model(&input)? else {
                bail!("{} is not a lumped-system file", input.display());
            };
            let model = match kind {
                KindArg::Displacement => sys.to_model(OutputKind::Displacement)?,
                KindArg::Velocity => sys.to_model(OutputKind::Velocity)?,
                KindArg::Acceleration => sys.to_model(OutputKind::Acceleration)?,
                KindArg::ApparentMass => {
                    let residue = epsilon.map(ResidueSpec::new).transpose()?;
                    sys.apparent_mass_model(residue.as_ref())?
                }
            };
            let model = if coupling_form {
                to_coupling_form(&model, None)?
            } else {
                model
            };
            io::save_state_space(&output, &model)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Frf { input, grid, output } => {
            let model = load_state_space(&input)?;
            let h = model.frf(&grid.to_grid()?)?;
            io::write_frf(&output, &h)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Invert { input, output } => {
            let model = load_state_space(&input)?.invert()?;
            io::save_state_space(&output, &model)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Negate { input, output } => {
            let model = load_state_space(&input)?.negate();
            io::save_state_space(&output, &model)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Differentiate { input, times, output } => {
            let mut model = load_state_space(&input)?;
            for _ in 0..times {
                model = model.differentiate()?;
            }
            io::save_state_space(&output, &model)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Couple {
            method,
            components,
            ces,
            pairs,
            phi,
            reduce,
            output,
        } => {
            let comp_models: Vec<StateSpaceModel<f64>> = components
                .iter()
                .map(load_state_space)
                .collect::<Result<_>>()?;
            let comp_refs: Vec<&StateSpaceModel<f64>> = comp_models.iter().collect();
            let mut outs = Vec::new();
            for m in &comp_refs {
                outs.extend(m.outputs().iter().cloned());
            }
            let pair_refs: Vec<(&str, &str)> =
                pairs.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
            let model = match method {
                CoupleMethodArg::Primal => {
                    if !ces.is_empty() {
                        bail!("primal assembly takes no --ces");
                    }
                    if !matches!(reduce, ReduceArg::None) {
                        bail!("--reduce applies to rigid or relaxed coupling");
                    }
                    let bc = build_bc(&outs, &pair_refs, phi)?;
                    let lo = localization_from_bc(&bc);
                    primal_assemble(&comp_refs, &lo)?
                }
                CoupleMethodArg::Rigid | CoupleMethodArg::Relaxed => {
                    let bc = build_bc(&outs, &pair_refs, phi)?;
                    let result = match method {
                        CoupleMethodArg::Rigid => {
                            if !ces.is_empty() {
                                bail!("rigid coupling takes no --ces");
                            }
                            couple_rigid(&comp_refs, &bc)?
                        }
                        _ => {
                            let ce_models: Vec<StateSpaceModel<f64>> =
                                ces.iter().map(load_state_space).collect::<Result<_>>()?;
                            let ce_refs: Vec<&StateSpaceModel<f64>> = ce_models.iter().collect();
                            couple_relaxed(&comp_refs, &ce_refs, &bc)?
                        }
                    };
                    match reduce {
                        ReduceArg::None => result.model,
                        ReduceArg::Lt => {
                            let rm = match method {
                                CoupleMethodArg::Rigid => build_bt_rigid(&result.layout)?,
                                _ => build_bt_relaxed(&result.layout)?,
                            };
                            reduce_with_lt(&result.model, &rm)?
                        }
                        ReduceArg::Manual => match method {
                            CoupleMethodArg::Relaxed => {
                                reduce_manual_relaxed(&result.model, &result.layout)?
                            }
                            _ => bail!("the manual procedure applies to relaxed coupling"),
                        },
                    }
                }
            };
            io::save_state_space(&output, &model)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Decouple {
            method,
            assembly,
            remove,
            pairs,
            phi,
            output,
        } => {
            let asm = load_state_space(&assembly)?;
            let removed: Vec<StateSpaceModel<f64>> =
                remove.iter().map(load_state_space).collect::<Result<_>>()?;
            let removed_refs: Vec<&StateSpaceModel<f64>> = removed.iter().collect();
            let pair_refs: Vec<(&str, &str)> =
                pairs.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
            let model = match method {
                DecoupleMethodArg::Primal => {
                    let mut outs = asm.outputs().to_vec();
                    for m in &removed_refs {
                        outs.extend(m.outputs().iter().cloned());
                    }
                    let bc = build_bc(&outs, &pair_refs, phi)?;
                    let lo = localization_from_bc(&bc);
                    primal_disassemble(&asm, &removed_refs, &lo)?
                }
                DecoupleMethodArg::Lm => decouple_lm(&asm, &removed_refs, &pair_refs, phi)?.model,
            };
            io::save_state_space(&output, &model)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Invsub {
            input,
            side1,
            side2,
            epsilon,
            coupling_form,
            output,
        } => {
            let disp = match io::load_model(&input)? {
                LoadedModel::StateSpace(m) => m,
                LoadedModel::Lumped(s) => s.to_model(OutputKind::Displacement)?,
            };
            let sel = IsSelection::new(side1, side2)?;
            let opts = IsOptions {
                coupling_form,
                residue: Some(ResidueSpec::new(epsilon)?),
            };
            let ce = is_identify_ce(&disp, &sel, &opts)?;
            io::save_state_space(&output, &ce)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Noise {
            input,
            sigma,
            seed,
            quantity,
            output,
        } => {
            let h = io::read_frf(&input, quantity.into())?;
            let noisy = oracle::add_noise(&h, &oracle::NoiseSpec::new(sigma, seed)?)?;
            io::write_frf(&output, &noisy)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Compare { a, b, tol, quantity } => {
            let ha = io::read_frf(&a, quantity.into())?;
            let hb = io::read_frf(&b, quantity.into())?;
            let cmp = oracle::compare_frf(&ha, &hb)?;
            let report = serde_json::json!({
                "max_rel_error": cmp.max_rel_error,
                "tol": tol,
                "pass": cmp.max_rel_error <= tol,
                "worst_freq_hz": cmp.worst_entry.0,
                "worst_output": cmp.worst_entry.1,
                "worst_input": cmp.worst_entry.2,
            });
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(if cmp.max_rel_error <= tol {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Cmd::Pipeline { config } => {
            let cfg = pipeline::load_config(&config)?;
            let base = config
                .parent()
                .map(|p| p.to_path_buf())
                .unwrap_or_else(|| PathBuf::from("."));
            let report = pipeline::run_pipeline(&cfg, &base);
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(if report.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}
