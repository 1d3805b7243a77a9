//! Prosodic analysis of speech.
//!
//! Annotation mining from TextGrid files, F0 estimation, polynomial
//! stylisation of F0 contours, timing irregularity metrics, musical-interval
//! analysis of chanted contours, a tone-terracing transducer and SVG plots.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod annotation;
pub mod cli;
pub mod fmt;
pub mod metrics;
pub mod render;
pub mod scales;
pub mod signal;
pub mod stylization;
pub mod tonefst;
