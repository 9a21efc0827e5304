//! Errors of the command-line front end and their machine-readable codes.

use std::fmt;

use serde_json::{json, Value};
use toric_mirror::braid::BraidError;
use toric_mirror::cech::CechError;
use toric_mirror::equivariant::AlgebraError;
use toric_mirror::fan::FanError;
use toric_mirror::graph::GraphError;
use toric_mirror::transport::TransportError;

/// Whether an error is the caller's fault (exit 2) or the mathematics said no (exit 1).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorClass {
    Domain,
    Usage,
}

impl ErrorClass {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorClass::Domain => 1,
            ErrorClass::Usage => 2,
        }
    }
}

/// A diagnostic with a stable code such as `graph/not_liftable`.
#[derive(Clone, Debug, PartialEq)]
pub struct CliError {
    pub class: ErrorClass,
    pub code: String,
    pub message: String,
    pub details: Value,
}

impl CliError {
    pub fn usage(code: &str, message: impl Into<String>) -> Self {
        CliError { class: ErrorClass::Usage, code: format!("usage/{code}"), message: message.into(), details: Value::Null }
    }

    pub fn input(code: &str, message: impl Into<String>) -> Self {
        CliError { class: ErrorClass::Domain, code: format!("input/{code}"), message: message.into(), details: Value::Null }
    }

    pub fn io(code: &str, path: &std::path::Path, err: &std::io::Error) -> Self {
        CliError {
            class: ErrorClass::Domain,
            code: format!("io/{code}"),
            message: format!("{}: {err}", path.display()),
            details: json!({ "path": path.display().to_string() }),
        }
    }

    pub fn domain(code: String, message: String) -> Self {
        CliError { class: ErrorClass::Domain, code, message, details: Value::Null }
    }

    pub fn with_details(mut self, details: Value) -> Self {
        self.details = details;
        self
    }

    pub fn exit_code(&self) -> i32 {
        self.class.exit_code()
    }

    /// The JSON diagnostic written to stderr.
    pub fn to_json(&self) -> Value {
        let mut body = json!({ "code": self.code, "message": self.message });
        if !self.details.is_null() {
            body["details"] = self.details.clone();
        }
        json!({ "error": body })
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.code, self.message)
    }
}

impl std::error::Error for CliError {}

/// `NotLiftable { .. }` → `not_liftable`: the variant name of a derived `Debug`, in snake case.
pub(crate) fn variant_code<E: fmt::Debug>(e: &E) -> String {
    let debug = format!("{e:?}");
    let name: String = debug.chars().take_while(|c| c.is_alphanumeric()).collect();
    let mut out = String::new();
    for (k, c) in name.chars().enumerate() {
        if c.is_uppercase() {
            if k > 0 {
                out.push('_');
            }
            out.extend(c.to_lowercase());
        } else {
            out.push(c);
        }
    }
    out
}

fn tagged<E: fmt::Debug + fmt::Display>(domain: &str, e: &E) -> CliError {
    CliError::domain(format!("{domain}/{}", variant_code(e)), e.to_string())
}

impl From<FanError> for CliError {
    fn from(e: FanError) -> Self {
        tagged("fan", &e)
    }
}

impl From<CechError> for CliError {
    fn from(e: CechError) -> Self {
        tagged("cohomology", &e)
    }
}

impl From<AlgebraError> for CliError {
    fn from(e: AlgebraError) -> Self {
        tagged("algebra", &e)
    }
}

impl From<GraphError> for CliError {
    fn from(e: GraphError) -> Self {
        let base = tagged("graph", &e);
        match e {
            GraphError::NotLiftable { edges, integral } => base.with_details(json!({ "witness": { "edges": edges, "integral": integral } })),
            GraphError::SelfIntersection { a, b, r, q } => base.with_details(json!({ "edges": [a, b], "at": [r, q] })),
            _ => base,
        }
    }
}

impl From<TransportError> for CliError {
    fn from(e: TransportError) -> Self {
        match e {
            TransportError::Graph(g) => g.into(),
            TransportError::DegenerateConfiguration { r, q, cells } => {
                tagged("transport", &e).with_details(json!({ "near": [r, q], "cells": cells }))
            }
            TransportError::NoConvergence { iterations, residual, ref best } => {
                let best = serde_json::to_value(best).unwrap_or(Value::Null);
                tagged("transport", &e).with_details(json!({ "iterations": iterations, "residual": residual, "best_weights": best }))
            }
            _ => tagged("transport", &e),
        }
    }
}

impl From<BraidError> for CliError {
    fn from(e: BraidError) -> Self {
        let base = tagged("braid", &e);
        match e {
            BraidError::UnsupportedStratum { stratum, present, requested } => {
                base.with_details(json!({ "stratum": stratum, "present": present, "requested": requested }))
            }
            _ => base,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codes_are_snake_case_variant_names() {
        let e: CliError = GraphError::NotLiftable { edges: vec![0, 2], integral: "1/2".into() }.into();
        assert_eq!(e.code, "graph/not_liftable");
        assert_eq!(e.details["witness"]["edges"], json!([0, 2]));
        let e: CliError = GraphError::MissingMarkedPoint.into();
        assert_eq!(e.code, "graph/missing_marked_point");
        let e: CliError = TransportError::Graph(GraphError::Json("x".into())).into();
        assert_eq!(e.code, "graph/json");
        let e: CliError = FanError::ZeroRay { ray: 1 }.into();
        assert_eq!(e.code, "fan/zero_ray");
        assert_eq!(e.exit_code(), 1);
        assert_eq!(CliError::usage("bad_box", "x").exit_code(), 2);
    }
}
