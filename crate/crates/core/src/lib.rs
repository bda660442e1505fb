//! Generator of natural-language entailment datasets over the description
//! logic ALCQ.
//!
//! The crate is split along the generation pipeline:
//!
//! * [`syntax`]: concept expressions, axioms, knowledge bases and their text codec.
//! * [`reasoner`]: a tableau decision procedure, justifications, inference depth
//!   and a brute-force model-enumeration oracle.
//! * [`pcfg`]: level-graded probabilistic grammars, vocabulary pools and KB sampling.
//! * [`query`]: true/false/unknown query construction per inference depth.
//! * [`nl`]: natural-language and symbolic rendering.
//! * [`pipeline`]: dataset records, splits, statistics, verification.

pub mod nl;
pub mod pcfg;
pub mod pipeline;
pub mod query;
pub mod reasoner;
pub mod syntax;
