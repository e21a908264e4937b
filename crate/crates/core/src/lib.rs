//! Detection and categorization of out-of-vocabulary tokens in short
//! social-media messages.

pub mod corpus;
pub mod error;
pub mod features;
pub mod learn;
pub mod lexicon;
pub mod pipeline;
pub mod rules;
pub mod tagger;
pub mod topics;

pub use error::{Error, Result};
