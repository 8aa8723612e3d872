use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::SymbolicBound;
use crate::{Error, Result};

/// How a step combines its inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "op", content = "arg")]
pub enum StepOp {
    /// A named given value (no inputs).
    Given,
    /// Product of all inputs.
    Product,
    /// First input divided by the product of the rest.
    Quotient,
    /// Single input raised to an integer power.
    Power(i32),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub rule: String,
    pub formula: String,
    pub op: StepOp,
    pub inputs: Vec<(String, SymbolicBound)>,
    pub output_name: String,
    pub output: SymbolicBound,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivationTrace {
    pub steps: Vec<TraceStep>,
}

fn apply(op: StepOp, inputs: &[SymbolicBound]) -> Result<SymbolicBound> {
    match op {
        StepOp::Given => inputs
            .first()
            .cloned()
            .ok_or_else(|| Error::validation("given step without a value")),
        StepOp::Product => Ok(inputs
            .iter()
            .fold(SymbolicBound::int(1), |acc, x| acc.mul(x))),
        StepOp::Quotient => {
            let (first, rest) = inputs
                .split_first()
                .ok_or_else(|| Error::validation("quotient without inputs"))?;
            let denom = rest.iter().fold(SymbolicBound::int(1), |acc, x| acc.mul(x));
            first.div(&denom)
        }
        StepOp::Power(e) => match inputs {
            [x] => x.pow(e),
            _ => Err(Error::validation("power takes exactly one input")),
        },
    }
}

impl DerivationTrace {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records a given value under `name` and returns it.
    pub fn given(&mut self, rule: &str, name: &str, value: SymbolicBound) -> SymbolicBound {
        self.steps.push(TraceStep {
            rule: rule.to_string(),
            formula: format!("{name} = {value}"),
            op: StepOp::Given,
            inputs: vec![(name.to_string(), value.clone())],
            output_name: name.to_string(),
            output: value.clone(),
        });
        value
    }

    /// Applies `op` to named earlier values, records the step, returns the result.
    pub fn derive(
        &mut self,
        rule: &str,
        name: &str,
        op: StepOp,
        inputs: &[(&str, &SymbolicBound)],
    ) -> Result<SymbolicBound> {
        let values: Vec<SymbolicBound> = inputs.iter().map(|(_, v)| (*v).clone()).collect();
        let output = apply(op, &values)?;
        let names: Vec<&str> = inputs.iter().map(|(n, _)| *n).collect();
        let rhs = match op {
            StepOp::Given => names.join(""),
            StepOp::Product => names.join(" · "),
            StepOp::Quotient => match names.split_first() {
                Some((first, rest)) if !rest.is_empty() => format!("{first} / ({})", rest.join(" · ")),
                Some((first, _)) => first.to_string(),
                None => String::new(),
            },
            StepOp::Power(e) => format!("({})^{e}", names.join("")),
        };
        self.steps.push(TraceStep {
            rule: rule.to_string(),
            formula: format!("{name} = {rhs} = {output}"),
            op,
            inputs: inputs
                .iter()
                .map(|(n, v)| (n.to_string(), (*v).clone()))
                .collect(),
            output_name: name.to_string(),
            output: output.clone(),
        });
        Ok(output)
    }

    pub fn result(&self) -> Option<&SymbolicBound> {
        self.steps.last().map(|s| &s.output)
    }

    /// Re-executes every step from its inputs, resolving names to earlier
    /// outputs, and checks each recorded output. Returns the final value.
    pub fn replay(&self) -> Result<SymbolicBound> {
        let mut env: BTreeMap<&str, SymbolicBound> = BTreeMap::new();
        let mut last = None;
        for (i, step) in self.steps.iter().enumerate() {
            let values: Vec<SymbolicBound> = step
                .inputs
                .iter()
                .map(|(name, recorded)| {
                    if step.op == StepOp::Given {
                        return Ok(recorded.clone());
                    }
                    match env.get(name.as_str()) {
                        Some(v) if v == recorded => Ok(v.clone()),
                        Some(_) => Err(Error::validation(format!(
                            "step {i}: input {name} disagrees with its earlier derivation"
                        ))),
                        None => Ok(recorded.clone()),
                    }
                })
                .collect::<Result<_>>()?;
            let out = apply(step.op, &values)?;
            if out != step.output {
                return Err(Error::validation(format!(
                    "step {i} ({}) replays to {out}, recorded {}",
                    step.rule, step.output
                )));
            }
            env.insert(step.output_name.as_str(), out.clone());
            last = Some(out);
        }
        last.ok_or_else(|| Error::validation("empty trace"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn replay_detects_tampering() {
        let mut t = DerivationTrace::new();
        let a = t.given("given", "a", SymbolicBound::int(3));
        let b = t.given("given", "b", SymbolicBound::pi());
        let c = t.derive("product", "c", StepOp::Product, &[("a", &a), ("b", &b)]).unwrap();
        t.derive("square", "d", StepOp::Power(2), &[("c", &c)]).unwrap();
        assert_eq!(t.replay().unwrap(), SymbolicBound::int(9).mul(&SymbolicBound::pi().pow(2).unwrap()));
        let mut bad = t.clone();
        bad.steps[2].output = SymbolicBound::int(4);
        assert!(bad.replay().is_err());
        let mut bad = t.clone();
        bad.steps[0].inputs[0].1 = SymbolicBound::int(5);
        bad.steps[0].output = SymbolicBound::int(5);
        assert!(bad.replay().is_err());
    }
}
