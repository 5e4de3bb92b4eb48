use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

use super::LpInstance;

/// Partition as stored in instance files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionDoc {
    #[serde(rename = "B")]
    pub b: Vec<usize>,
    #[serde(rename = "N")]
    pub n: Vec<usize>,
}

/// Known optimum attached by the generators.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub x_star: Vec<f64>,
    pub s_star: Vec<f64>,
    pub optimal_support: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intended_partition: Option<PartitionDoc>,
    pub mu0: f64,
    pub strictly_complementary: bool,
}

/// On-disk JSON instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceDocument {
    pub m: usize,
    pub n: usize,
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s0: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ground_truth: Option<GroundTruth>,
}

impl InstanceDocument {
    pub fn from_instance(inst: &LpInstance<f64>, ground_truth: Option<GroundTruth>) -> Self {
        Self {
            m: inst.m(),
            n: inst.n(),
            a: inst.a.to_rows(),
            b: inst.b.clone(),
            c: inst.c.clone(),
            x0: inst.x0.clone(),
            s0: inst.s0.clone(),
            ground_truth,
        }
    }

    pub fn to_instance(&self) -> Result<LpInstance<f64>> {
        if self.a.len() != self.m {
            return Err(Error::InvalidInstance(format!("A has {} rows, m = {}", self.a.len(), self.m)));
        }
        if let Some(row) = self.a.iter().find(|r| r.len() != self.n) {
            return Err(Error::InvalidInstance(format!("row of length {}, n = {}", row.len(), self.n)));
        }
        let a = if self.m == 0 {
            DenseMatrix::zeros(0, self.n)
        } else {
            DenseMatrix::from_rows(&self.a).map_err(|e| Error::InvalidInstance(e.to_string()))?
        };
        let mut inst = LpInstance::new(a, self.b.clone(), self.c.clone())?;
        inst.x0 = self.x0.clone();
        inst.s0 = self.s0.clone();
        Ok(inst)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidInstance(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}
