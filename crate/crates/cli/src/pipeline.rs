//! Declarative pipelines: named artifacts flow through an ordered list of
//! operation steps; compare steps gate the exit status.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::json;

use substruct::coupling::{build_bc, couple_relaxed, couple_rigid, CouplingResult};
use substruct::frf::{FrequencyGrid, FrfMatrix};
use substruct::invsub::{is_identify_ce, IsOptions, IsSelection};
use substruct::io::{self, LoadedModel};
use substruct::lumped::{add_residue_mass, LumpedSystem, ResidueSpec, DEFAULT_EPSILON};
use substruct::model::OutputKind;
use substruct::primal::{localization_from_bc, primal_assemble, primal_disassemble};
use substruct::reduction::{build_bt_relaxed, build_bt_rigid, reduce_manual_relaxed, reduce_with_lt, to_coupling_form};
use substruct::StateSpaceModel;
use substruct_oracle as oracle;

/// Frequency grid specification.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GridSpec {
    pub f_min_hz: f64,
    pub f_max_hz: f64,
    pub lines: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            f_min_hz: 0.5,
            f_max_hz: 50.0,
            lines: 1024,
        }
    }
}

impl GridSpec {
    pub fn to_grid(self) -> Result<FrequencyGrid<f64>> {
        Ok(FrequencyGrid::linear_hz(self.f_min_hz, self.f_max_hz, self.lines)?)
    }
}

/// Noise defaults for `noise` steps.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct NoiseDefaults {
    pub sigma: f64,
    pub seed: u64,
}

/// Model output kind selector shared by config and CLI.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BuildKind {
    Displacement,
    Velocity,
    Acceleration,
    /// The inverted (force-output) construction; valid for massless systems.
    ApparentMass,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoupleMethod {
    Rigid,
    Relaxed,
    Primal,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReduceMethod {
    None,
    Lt,
    Manual,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecoupleMethod {
    Primal,
    Lm,
}

/// One pipeline step. `name` binds the produced artifact.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Step {
    /// Load a model file (state-space or lumped).
    Load { path: String, name: String },
    /// Build a state-space model from a lumped artifact.
    BuildSs {
        input: String,
        kind: BuildKind,
        #[serde(default)]
        coupling_form: bool,
        #[serde(default)]
        epsilon: Option<f64>,
        name: String,
    },
    Differentiate {
        input: String,
        #[serde(default = "one")]
        times: u32,
        name: String,
    },
    Invert { input: String, name: String },
    Negate { input: String, name: String },
    SelectIo {
        input: String,
        outputs: Vec<String>,
        inputs: Vec<String>,
        name: String,
    },
    AddResidue {
        input: String,
        #[serde(default)]
        epsilon: Option<f64>,
        name: String,
    },
    /// End-to-end element identification from a displacement assembly model
    /// (or a lumped artifact, which is built first).
    IdentifyCe {
        input: String,
        side1: Vec<String>,
        side2: Vec<String>,
        #[serde(default)]
        coupling_form: bool,
        #[serde(default)]
        epsilon: Option<f64>,
        name: String,
    },
    Couple {
        components: Vec<String>,
        #[serde(default)]
        ces: Vec<String>,
        pairs: Vec<(String, String)>,
        method: CoupleMethod,
        #[serde(default)]
        phi: Option<i32>,
        #[serde(default = "reduce_none")]
        reduce: ReduceMethod,
        name: String,
    },
    Decouple {
        assembly: String,
        remove: Vec<String>,
        pairs: Vec<(String, String)>,
        method: DecoupleMethod,
        #[serde(default)]
        phi: Option<i32>,
        name: String,
    },
    /// Evaluate a model on the global grid.
    Frf { input: String, name: String },
    /// Ground-truth accelerance of a lumped artifact (direct solve).
    OracleAccelerance { input: String, name: String },
    FrfBlockDiag { inputs: Vec<String>, name: String },
    OracleCoupleRigid {
        h: String,
        pairs: Vec<(String, String)>,
        #[serde(default)]
        phi: Option<i32>,
        name: String,
    },
    OracleCoupleRelaxed {
        h: String,
        ces: Vec<String>,
        pairs: Vec<(String, String)>,
        #[serde(default)]
        phi: Option<i32>,
        name: String,
    },
    /// Inverse substructuring on an accelerance FRF: pointwise inversion,
    /// off-diagonal retention, negation.
    OracleIs {
        input: String,
        side1: Vec<String>,
        side2: Vec<String>,
        name: String,
    },
    Noise {
        input: String,
        #[serde(default)]
        sigma: Option<f64>,
        #[serde(default)]
        seed: Option<u64>,
        name: String,
    },
    Compare { a: String, b: String, tol: f64 },
    WriteFrf { input: String, path: String },
    SaveModel { input: String, path: String },
}

fn one() -> u32 {
    1
}
fn reduce_none() -> ReduceMethod {
    ReduceMethod::None
}

/// Pipeline configuration file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PipelineConfig {
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default = "default_phi")]
    pub phi: i32,
    #[serde(default)]
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub noise: Option<NoiseDefaults>,
    pub steps: Vec<Step>,
}

fn default_phi() -> i32 {
    1
}

/// Per-step record of the machine-readable report.
#[derive(Debug, Serialize)]
pub struct StepReport {
    pub index: usize,
    pub op: String,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub metrics: serde_json::Value,
    pub pass: bool,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub pass: bool,
    pub steps: Vec<StepReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

enum Artifact {
    Lumped(LumpedSystem<f64>),
    Model(StateSpaceModel<f64>),
    Frf(FrfMatrix<f64>),
}

struct Store {
    items: BTreeMap<String, Artifact>,
}

impl Store {
    fn put(&mut self, name: &str, a: Artifact) -> Result<()> {
        if self.items.insert(name.to_string(), a).is_some() {
            bail!("artifact '{name}' defined twice");
        }
        Ok(())
    }
    fn model(&self, name: &str) -> Result<&StateSpaceModel<f64>> {
        match self.items.get(name) {
            Some(Artifact::Model(m)) => Ok(m),
            Some(_) => bail!("artifact '{name}' is not a state-space model"),
            None => bail!("unknown artifact '{name}'"),
        }
    }
    fn lumped(&self, name: &str) -> Result<&LumpedSystem<f64>> {
        match self.items.get(name) {
            Some(Artifact::Lumped(s)) => Ok(s),
            Some(_) => bail!("artifact '{name}' is not a lumped system"),
            None => bail!("unknown artifact '{name}'"),
        }
    }
    fn frf(&self, name: &str) -> Result<&FrfMatrix<f64>> {
        match self.items.get(name) {
            Some(Artifact::Frf(h)) => Ok(h),
            Some(_) => bail!("artifact '{name}' is not an FRF"),
            None => bail!("unknown artifact '{name}'"),
        }
    }
    /// Displacement model from either a model or a lumped artifact.
    fn displacement_model(&self, name: &str) -> Result<StateSpaceModel<f64>> {
        match self.items.get(name) {
            Some(Artifact::Model(m)) => Ok(m.clone()),
            Some(Artifact::Lumped(s)) => Ok(s.to_model(OutputKind::Displacement)?),
            Some(_) => bail!("artifact '{name}' is not a model or lumped system"),
            None => bail!("unknown artifact '{name}'"),
        }
    }
}

fn pair_refs(pairs: &[(String, String)]) -> Vec<(&str, &str)> {
    pairs.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect()
}

fn str_refs(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

/// Runs a pipeline. The report accumulates one record per executed step;
/// the first failing step aborts.
pub fn run_pipeline(cfg: &PipelineConfig, base_dir: &Path) -> Report {
    let mut steps = Vec::new();
    match run_inner(cfg, base_dir, &mut steps) {
        Ok(()) => Report {
            pass: steps.iter().all(|s| s.pass),
            steps,
            error: None,
        },
        Err(e) => Report {
            pass: false,
            steps,
            error: Some(format!("{e:#}")),
        },
    }
}

fn run_inner(cfg: &PipelineConfig, base_dir: &Path, reports: &mut Vec<StepReport>) -> Result<()> {
    let grid = cfg.grid.to_grid()?;
    let default_eps = cfg.epsilon.unwrap_or(DEFAULT_EPSILON);
    let mut store = Store {
        items: BTreeMap::new(),
    };
    let resolve_path = |p: &str| -> PathBuf {
        let path = Path::new(p);
        let joined = if path.is_absolute() {
            path.to_path_buf()
        } else {
            base_dir.join(path)
        };
        normalize(&joined)
    };

    for (index, step) in cfg.steps.iter().enumerate() {
        let mut record = StepReport {
            index,
            op: step_op_name(step).to_string(),
            inputs: vec![],
            outputs: vec![],
            metrics: json!({}),
            pass: true,
        };
        let result = execute_step(
            step,
            &mut store,
            &grid,
            cfg,
            default_eps,
            &resolve_path,
            &mut record,
        );
        match result {
            Ok(()) => {
                let failed = !record.pass;
                reports.push(record);
                if failed {
                    // tolerance failure aborts with the accumulated report
                    return Ok(());
                }
            }
            Err(e) => {
                record.pass = false;
                record.metrics = json!({ "error": format!("{e:#}") });
                reports.push(record);
                return Err(e.context(format!("step {index}")));
            }
        }
    }
    Ok(())
}

fn step_op_name(step: &Step) -> &'static str {
    match step {
        Step::Load { .. } => "load",
        Step::BuildSs { .. } => "build_ss",
        Step::Differentiate { .. } => "differentiate",
        Step::Invert { .. } => "invert",
        Step::Negate { .. } => "negate",
        Step::SelectIo { .. } => "select_io",
        Step::AddResidue { .. } => "add_residue",
        Step::IdentifyCe { .. } => "identify_ce",
        Step::Couple { .. } => "couple",
        Step::Decouple { .. } => "decouple",
        Step::Frf { .. } => "frf",
        Step::OracleAccelerance { .. } => "oracle_accelerance",
        Step::FrfBlockDiag { .. } => "frf_block_diag",
        Step::OracleCoupleRigid { .. } => "oracle_couple_rigid",
        Step::OracleCoupleRelaxed { .. } => "oracle_couple_relaxed",
        Step::OracleIs { .. } => "oracle_is",
        Step::Noise { .. } => "noise",
        Step::Compare { .. } => "compare",
        Step::WriteFrf { .. } => "write_frf",
        Step::SaveModel { .. } => "save_model",
    }
}

#[allow(clippy::too_many_arguments)]
fn execute_step(
    step: &Step,
    store: &mut Store,
    grid: &FrequencyGrid<f64>,
    cfg: &PipelineConfig,
    default_eps: f64,
    resolve_path: &dyn Fn(&str) -> PathBuf,
    record: &mut StepReport,
) -> Result<()> {
    match step {
        Step::Load { path, name } => {
            let loaded = io::load_model(resolve_path(path))?;
            record.outputs = vec![name.clone()];
            match loaded {
                LoadedModel::StateSpace(m) => store.put(name, Artifact::Model(m))?,
                LoadedModel::Lumped(s) => store.put(name, Artifact::Lumped(s))?,
            }
        }
        Step::BuildSs {
            input,
            kind,
            coupling_form,
            epsilon,
            name,
        } => {
            record.inputs = vec![input.clone()];
            record.outputs = vec![name.clone()];
            let sys = store.lumped(input)?;
            let model = match kind {
                BuildKind::Displacement => sys.to_model(OutputKind::Displacement)?,
                BuildKind::Velocity => sys.to_model(OutputKind::Velocity)?,
                BuildKind::Acceleration => sys.to_model(OutputKind::Acceleration)?,
                BuildKind::ApparentMass => {
                    let residue = epsilon.map(ResidueSpec::new).transpose()?;
                    sys.apparent_mass_model(residue.as_ref())?
                }
            };
            let model = if *coupling_form {
                to_coupling_form(&model, None)?
            } else {
                model
            };
            store.put(name, Artifact::Model(model))?;
        }
        Step::Differentiate { input, times, name } => {
            record.inputs = vec![input.clone()];
            record.outputs = vec![name.clone()];
            let mut m = store.model(input)?.clone();
            for _ in 0..*times {
                m = m.differentiate()?;
            }
            store.put(name, Artifact::Model(m))?;
        }
        Step::Invert { input, name } => {
            record.inputs = vec![input.clone()];
            record.outputs = vec![name.clone()];
            let m = store.model(input)?.invert()?;
            store.put(name, Artifact::Model(m))?;
        }
        Step::Negate { input, name } => {
            record.inputs = vec![input.clone()];
            record.outputs = vec![name.clone()];
            let m = store.model(input)?.negate();
            store.put(name, Artifact::Model(m))?;
        }
        Step::SelectIo {
            input,
            outputs,
            inputs,
            name,
        } => {
            record.inputs = vec![input.clone()];
            record.outputs = vec![name.clone()];
            let m = store
                .model(input)?
                .select_io(&str_refs(outputs), &str_refs(inputs))?;
            store.put(name, Artifact::Model(m))?;
        }
        Step::AddResidue { input, epsilon, name } => {
            record.inputs = vec![input.clone()];
            record.outputs = vec![name.clone()];
            let residue = ResidueSpec::new(epsilon.unwrap_or(default_eps))?;
            let m = add_residue_mass(store.model(input)?, &residue)?;
            store.put(name, Artifact::Model(m))?;
        }
        Step::IdentifyCe {
            input,
            side1,
            side2,
            coupling_form,
            epsilon,
            name,
        } => {
            record.inputs = vec![input.clone()];
            record.outputs = vec![name.clone()];
            let disp = store.displacement_model(input)?;
            let sel = IsSelection::new(side1.clone(), side2.clone())?;
            let opts = IsOptions {
                coupling_form: *coupling_form,
                residue: Some(ResidueSpec::new(epsilon.unwrap_or(default_eps))?),
            };
            let ce = is_identify_ce(&disp, &sel, &opts)?;
            store.put(name, Artifact::Model(ce))?;
        }
        Step::Couple {
            components,
            ces,
            pairs,
            method,
            phi,
            reduce,
            name,
        } => {
            record.inputs = components.iter().chain(ces.iter()).cloned().collect();
            record.outputs = vec![name.clone()];
            let phi = phi.unwrap_or(cfg.phi);
            let comp_models: Vec<&StateSpaceModel<f64>> = components
                .iter()
                .map(|n| store.model(n))
                .collect::<Result<_>>()?;
            let mut outs = Vec::new();
            for m in &comp_models {
                outs.extend(m.outputs().iter().cloned());
            }
            let result: CouplingResult<f64> = match method {
                CoupleMethod::Rigid => {
                    if !ces.is_empty() {
                        bail!("rigid coupling takes no connecting elements");
                    }
                    let bc = build_bc(&outs, &pair_refs(pairs), phi)?;
                    couple_rigid(&comp_models, &bc)?
                }
                CoupleMethod::Relaxed => {
                    let ce_models: Vec<&StateSpaceModel<f64>> =
                        ces.iter().map(|n| store.model(n)).collect::<Result<_>>()?;
                    let bc = build_bc(&outs, &pair_refs(pairs), phi)?;
                    couple_relaxed(&comp_models, &ce_models, &bc)?
                }
                CoupleMethod::Primal => {
                    if !ces.is_empty() {
                        bail!("primal assembly treats every part as a component");
                    }
                    let bc = build_bc(&outs, &pair_refs(pairs), phi)?;
                    let lo = localization_from_bc(&bc);
                    let asm = primal_assemble(&comp_models, &lo)?;
                    if !matches!(reduce, ReduceMethod::None) {
                        bail!("--reduce applies to rigid or relaxed coupling");
                    }
                    store.put(name, Artifact::Model(asm))?;
                    record.metrics = json!({"states": store.model(name)?.n_states()});
                    return Ok(());
                }
            };
            let model = match reduce {
                ReduceMethod::None => result.model,
                ReduceMethod::Lt => {
                    let rm = match method {
                        CoupleMethod::Rigid => build_bt_rigid(&result.layout)?,
                        _ => build_bt_relaxed(&result.layout)?,
                    };
                    reduce_with_lt(&result.model, &rm)?
                }
                ReduceMethod::Manual => match method {
                    CoupleMethod::Relaxed => reduce_manual_relaxed(&result.model, &result.layout)?,
                    _ => bail!("the manual procedure applies to relaxed coupling"),
                },
            };
            record.metrics = json!({"states": model.n_states()});
            store.put(name, Artifact::Model(model))?;
        }
        Step::Decouple {
            assembly,
            remove,
            pairs,
            method,
            phi,
            name,
        } => {
            record.inputs = std::iter::once(assembly.clone())
                .chain(remove.iter().cloned())
                .collect();
            record.outputs = vec![name.clone()];
            let phi = phi.unwrap_or(cfg.phi);
            let asm = store.model(assembly)?;
            let removed: Vec<&StateSpaceModel<f64>> =
                remove.iter().map(|n| store.model(n)).collect::<Result<_>>()?;
            let model = match method {
                DecoupleMethod::Primal => {
                    let mut outs = asm.outputs().to_vec();
                    for m in &removed {
                        outs.extend(m.outputs().iter().cloned());
                    }
                    let bc = build_bc(&outs, &pair_refs(pairs), phi)?;
                    let lo = localization_from_bc(&bc);
                    primal_disassemble(asm, &removed, &lo)?
                }
                DecoupleMethod::Lm => {
                    substruct::coupling::decouple_lm(asm, &removed, &pair_refs(pairs), phi)?.model
                }
            };
            record.metrics = json!({"states": model.n_states()});
            store.put(name, Artifact::Model(model))?;
        }
        Step::Frf { input, name } => {
            record.inputs = vec![input.clone()];
            record.outputs = vec![name.clone()];
            let h = store.model(input)?.frf(grid)?;
            store.put(name, Artifact::Frf(h))?;
        }
        Step::OracleAccelerance { input, name } => {
            record.inputs = vec![input.clone()];
            record.outputs = vec![name.clone()];
            let h = oracle::direct::accelerance_from_mkv(store.lumped(input)?, grid)?;
            store.put(name, Artifact::Frf(h))?;
        }
        Step::FrfBlockDiag { inputs, name } => {
            record.inputs = inputs.clone();
            record.outputs = vec![name.clone()];
            let blocks: Vec<&FrfMatrix<f64>> =
                inputs.iter().map(|n| store.frf(n)).collect::<Result<_>>()?;
            let h = FrfMatrix::block_diagonal(&blocks)?;
            store.put(name, Artifact::Frf(h))?;
        }
        Step::OracleCoupleRigid { h, pairs, phi, name } => {
            record.inputs = vec![h.clone()];
            record.outputs = vec![name.clone()];
            let hm = store.frf(h)?;
            let bc = build_bc(hm.outputs(), &pair_refs(pairs), phi.unwrap_or(cfg.phi))?;
            let out = oracle::fbs_couple_rigid(hm, &bc)?;
            store.put(name, Artifact::Frf(out))?;
        }
        Step::OracleCoupleRelaxed {
            h,
            ces,
            pairs,
            phi,
            name,
        } => {
            record.inputs = std::iter::once(h.clone()).chain(ces.iter().cloned()).collect();
            record.outputs = vec![name.clone()];
            let hm = store.frf(h)?;
            let ce_frfs: Vec<&FrfMatrix<f64>> =
                ces.iter().map(|n| store.frf(n)).collect::<Result<_>>()?;
            let bc = build_bc(hm.outputs(), &pair_refs(pairs), phi.unwrap_or(cfg.phi))?;
            let out = oracle::fbs_couple_relaxed(hm, &ce_frfs, &bc)?;
            store.put(name, Artifact::Frf(out))?;
        }
        Step::OracleIs {
            input,
            side1,
            side2,
            name,
        } => {
            record.inputs = vec![input.clone()];
            record.outputs = vec![name.clone()];
            let h = store.frf(input)?;
            let z = oracle::invert_frf(h)?;
            let sel = IsSelection::new(side1.clone(), side2.clone())?;
            let diag = oracle::is_on_frf(&z, &sel)?;
            store.put(name, Artifact::Frf(diag))?;
        }
        Step::Noise {
            input,
            sigma,
            seed,
            name,
        } => {
            record.inputs = vec![input.clone()];
            record.outputs = vec![name.clone()];
            let defaults = cfg.noise.unwrap_or(NoiseDefaults { sigma: 0.0, seed: 0 });
            let ns = oracle::NoiseSpec::new(
                sigma.unwrap_or(defaults.sigma),
                seed.unwrap_or(defaults.seed),
            )?;
            let out = oracle::add_noise(store.frf(input)?, &ns)?;
            store.put(name, Artifact::Frf(out))?;
        }
        Step::Compare { a, b, tol } => {
            record.inputs = vec![a.clone(), b.clone()];
            let cmp = oracle::compare_frf(store.frf(a)?, store.frf(b)?)?;
            record.pass = cmp.max_rel_error <= *tol;
            record.metrics = json!({
                "max_rel_error": cmp.max_rel_error,
                "tol": tol,
                "worst_freq_hz": cmp.worst_entry.0,
                "worst_output": cmp.worst_entry.1,
                "worst_input": cmp.worst_entry.2,
            });
        }
        Step::WriteFrf { input, path } => {
            record.inputs = vec![input.clone()];
            record.outputs = vec![path.clone()];
            io::write_frf(resolve_path(path), store.frf(input)?)?;
        }
        Step::SaveModel { input, path } => {
            record.inputs = vec![input.clone()];
            record.outputs = vec![path.clone()];
            io::save_state_space(resolve_path(path), store.model(input)?)?;
        }
    }
    Ok(())
}

/// Lexically resolves `.` and `..` components so that directory creation
/// never has to walk through parent links.
fn normalize(path: &Path) -> PathBuf {
    use std::path::Component;
    let mut out = PathBuf::new();
    for c in path.components() {
        match c {
            Component::CurDir => {}
            Component::ParentDir => {
                if !out.pop() {
                    out.push("..");
                }
            }
            other => out.push(other.as_os_str()),
        }
    }
    out
}

/// Loads a pipeline configuration.
pub fn load_config(path: &Path) -> Result<PipelineConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let cfg: PipelineConfig = serde_json::from_str(&text)
        .map_err(|e| anyhow!("{}: line {}, column {}: {e}", path.display(), e.line(), e.column()))?;
    Ok(cfg)
}
