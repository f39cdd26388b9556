//! Bridges to external OCR engines and editing models.
//!
//! Both run as subprocesses with a JSON or path-on-stdout wire contract, each
//! invocation in its own temporary working directory. Ground-truth and
//! precomputed modes need no external tools at all.

mod editor;
mod ocr;
mod process;

pub use self::editor::{run_editor, EditorBackend, EditorBackendMode};
pub use self::ocr::{
    assign_target, detect_text, parse_ocr_output, read_text, DetectedRegion, OcrBackend,
    OcrBackendMode,
};
pub use self::process::{CommandSpec, DEFAULT_TIMEOUT};
