use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::process::{run_captured, CommandSpec, DEFAULT_TIMEOUT};
use crate::error::{Error, Result};
use crate::scene::{RasterImage, SceneSpec};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EditorBackendMode {
    /// Load the manifest's `edited` image.
    #[default]
    Precomputed,
    ExternalCommand,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EditorBackend {
    pub mode: EditorBackendMode,
    pub command: Option<CommandSpec>,
    pub timeout: Duration,
}

impl Default for EditorBackend {
    fn default() -> Self {
        Self {
            mode: EditorBackendMode::Precomputed,
            command: None,
            timeout: DEFAULT_TIMEOUT,
        }
    }
}

impl EditorBackend {
    pub fn external(command: CommandSpec) -> Self {
        Self {
            mode: EditorBackendMode::ExternalCommand,
            command: Some(command),
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.mode == EditorBackendMode::ExternalCommand && self.command.is_none() {
            return Err(Error::config("external editor mode requires a command"));
        }
        Ok(())
    }
}

/// Stage 3: obtains the edited image for a scene.
///
/// An external editor is called as
/// `<cmd> <args> --source <path> --target-id <id> --target-text <text> --quad <x1,y1,...,x4,y4>`
/// and must print the output image path as the last line of stdout.
/// Relative paths are resolved against the invocation's working directory.
pub fn run_editor(
    backend: &EditorBackend,
    scene: &SceneSpec,
    base_dir: &Path,
) -> Result<RasterImage> {
    match backend.mode {
        EditorBackendMode::Precomputed => {
            let path = scene.edited_path(base_dir).ok_or_else(|| {
                Error::Missing(format!(
                    "scene '{}' has no precomputed edited image",
                    scene.scene_id
                ))
            })?;
            RasterImage::load_png(&path)
        }
        EditorBackendMode::ExternalCommand => {
            let command = backend
                .command
                .as_ref()
                .ok_or_else(|| Error::config("external editor mode requires a command"))?;
            let source = std::path::absolute(scene.source_path(base_dir))?;
            let target = scene.target();
            let quad = target
                .quad
                .to_flat()
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(",");
            let mut args = command.args.clone();
            args.extend([
                "--source".to_string(),
                source.to_string_lossy().into_owned(),
                "--target-id".to_string(),
                target.id.clone(),
                "--target-text".to_string(),
                scene.target_text.clone(),
                "--quad".to_string(),
                quad,
            ]);
            let work = tempfile::tempdir()?;
            let out = run_captured(&command.program, &args, work.path(), backend.timeout)?;
            let line = out
                .stdout
                .lines()
                .map(str::trim)
                .rfind(|l| !l.is_empty())
                .ok_or_else(|| Error::Backend {
                    message: "editor printed no output path".into(),
                    stderr: out.stderr.clone(),
                })?;
            let mut path = PathBuf::from(line);
            if path.is_relative() {
                path = work.path().join(path);
            }
            RasterImage::load_png(&path).map_err(|e| Error::Backend {
                message: format!("unreadable editor output: {e}"),
                stderr: out.stderr.clone(),
            })
        }
    }
}
