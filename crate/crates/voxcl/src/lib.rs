//! Contrastive pre-training for volumetric image segmentation.
//!
//! The crate implements the full pipeline at desk scale:
//!
//! - [`voldata`]: volume container, `.vol` file format, preprocessing,
//!   slice partitioning.
//! - [`synth`]: deterministic phantom dataset generator with aligned
//!   anatomy-like structures and labels.
//! - [`transforms`]: the transformation family for contrastive pairs and
//!   fine-tuning augmentation, plus Mixup.
//! - [`pairsets`]: batch/region plan composition for the global strategies
//!   (random, partition-aware negatives, partition-aware positives) and the
//!   local strategies.
//! - [`losses`]: temperature-scaled contrastive losses over those plans,
//!   with analytic gradients.
//! - [`network`]: a differentiable encoder-decoder (f64) with projection
//!   heads, segmentation head, Adam, checkpoints, and a finite-difference
//!   gradient checker.
//! - [`trainer`]: stage-wise pre-training (global, local, joint) and
//!   fine-tuning with validation-based model selection.
//! - [`eval`]: Dice evaluation and the multi-seed experiment matrix.

pub mod error;
pub mod eval;
pub mod losses;
pub mod network;
pub mod pairsets;
pub mod parallel;
pub mod rng;
pub mod synth;
pub mod trainer;
pub mod transforms;
pub mod voldata;

pub use error::{Error, Result};
