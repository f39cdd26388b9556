//! Corpus-level drivers behind the command-line tool: field export, full
//! pipeline runs, standalone evaluation, parameter sweeps and the synthetic
//! scene generator.

mod evaluate;
mod field_cmd;
mod pipeline;
mod sweep;
mod synth;

pub use self::evaluate::{cmd_eval, locate_output, EvalReport};
pub use self::field_cmd::{cmd_field, FieldOutputs};
pub use self::pipeline::{
    cmd_run, scene_dir, PipelineOptions, RunReport, SceneError, SceneOutcome, FOUND_RATE_NOTE,
};
pub use self::sweep::{cmd_sweep, SweepRow, SweepSpec, SweepTable};
pub use self::synth::{
    generate_corpus, generate_synthetic, write_corpus, CorpusSpec, Corruption, SpillPattern,
    SyntheticScene, SyntheticSceneSpec,
};
