use std::collections::BTreeMap;

/// Outcome of a decision or semidecision procedure.
#[derive(Clone, Debug)]
pub enum Verdict<C, W> {
    Valid(C),
    Invalid(W),
    /// Budgets ran out before either a certificate or a witness was found.
    Unknown(BudgetReport),
}

impl<C, W> Verdict<C, W> {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid(_))
    }

    pub fn is_invalid(&self) -> bool {
        matches!(self, Verdict::Invalid(_))
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, Verdict::Unknown(_))
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Valid(_) => "valid",
            Verdict::Invalid(_) => "invalid",
            Verdict::Unknown(_) => "unknown",
        }
    }
}

/// Which budgets were reached, keyed by name.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BudgetReport {
    pub reached: BTreeMap<String, u64>,
}

impl BudgetReport {
    pub fn with(mut self, key: &str, value: u64) -> Self {
        self.reached.insert(key.to_string(), value);
        self
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Object(
            self.reached
                .iter()
                .map(|(k, v)| (k.clone(), serde_json::Value::from(*v)))
                .collect(),
        )
    }
}
