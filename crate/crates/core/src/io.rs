//! JSON file formats. Elements are 1-indexed and field values are residues
//! in `[0, p)`.

use serde::{Deserialize, Serialize};

use crate::combinatorics::SubsetMask;
use crate::error::{Error, Result};
use crate::field::FieldContext;
use crate::setcover::SetCoverInstance;
use crate::tensor::{Decomposition, RankOneTerm, SparseTensor};
use crate::tripartition::TripartitionInstance;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermFile {
    pub u: Vec<u64>,
    pub v: Vec<u64>,
    pub w: Vec<u64>,
    pub scale: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionFile {
    pub p: u64,
    pub dims: [usize; 3],
    pub terms: Vec<TermFile>,
}

impl From<&Decomposition> for DecompositionFile {
    fn from(d: &Decomposition) -> Self {
        let raw = |v: &[crate::field::FieldElement]| v.iter().map(|x| x.value()).collect();
        DecompositionFile {
            p: d.field().modulus(),
            dims: d.dims(),
            terms: d
                .terms()
                .iter()
                .map(|t| TermFile {
                    u: raw(&t.u),
                    v: raw(&t.v),
                    w: raw(&t.w),
                    scale: t.scale.value(),
                })
                .collect(),
        }
    }
}

impl DecompositionFile {
    pub fn into_decomposition(self) -> Result<Decomposition> {
        let field = FieldContext::new(self.p)?;
        let residues = |v: Vec<u64>| {
            v.into_iter()
                .map(|x| field.checked(x))
                .collect::<Result<Vec<_>>>()
        };
        let terms = self
            .terms
            .into_iter()
            .map(|t| {
                Ok(RankOneTerm {
                    u: residues(t.u)?,
                    v: residues(t.v)?,
                    w: residues(t.w)?,
                    scale: field.checked(t.scale)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Decomposition::new(field, self.dims, terms)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TensorFile {
    pub p: u64,
    pub dims: [usize; 3],
    /// `[i, j, k, coefficient]`, 0-indexed positions.
    pub entries: Vec<[u64; 4]>,
}

impl From<&SparseTensor> for TensorFile {
    fn from(t: &SparseTensor) -> Self {
        TensorFile {
            p: t.field().modulus(),
            dims: t.dims(),
            entries: t
                .entries()
                .map(|([i, j, k], c)| [i as u64, j as u64, k as u64, c.value()])
                .collect(),
        }
    }
}

impl TensorFile {
    pub fn into_tensor(self) -> Result<SparseTensor> {
        let field = FieldContext::new(self.p)?;
        let entries = self
            .entries
            .into_iter()
            .map(|[i, j, k, c]| Ok(([i as usize, j as usize, k as usize], field.checked(c)?)))
            .collect::<Result<Vec<_>>>()?;
        SparseTensor::from_entries(field, self.dims, entries)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripartitionFile {
    pub n: usize,
    pub families: Vec<Vec<Vec<usize>>>,
}

impl From<&TripartitionInstance> for TripartitionFile {
    fn from(inst: &TripartitionInstance) -> Self {
        TripartitionFile {
            n: inst.n(),
            families: inst
                .families()
                .iter()
                .map(|f| f.iter().map(|s| s.elements()).collect())
                .collect(),
        }
    }
}

impl TripartitionFile {
    pub fn into_instance(self) -> Result<TripartitionInstance> {
        if self.families.len() != 3 {
            return Err(Error::Input(format!(
                "expected 3 families, found {}",
                self.families.len()
            )));
        }
        let m = 3 * self.n;
        let mut families: [Vec<SubsetMask>; 3] = Default::default();
        for (slot, family) in families.iter_mut().zip(self.families) {
            *slot = family
                .iter()
                .map(|e| SubsetMask::from_elements(e, m))
                .collect::<Result<_>>()?;
        }
        TripartitionInstance::new(self.n, families)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetCoverFile {
    pub n: usize,
    pub t: usize,
    pub s: usize,
    pub sets: Vec<Vec<usize>>,
}

impl From<&SetCoverInstance> for SetCoverFile {
    fn from(inst: &SetCoverInstance) -> Self {
        SetCoverFile {
            n: inst.n(),
            t: inst.t(),
            s: inst.s(),
            sets: inst.sets().iter().map(|s| s.elements()).collect(),
        }
    }
}

impl SetCoverFile {
    pub fn into_instance(self) -> Result<SetCoverInstance> {
        let sets = self
            .sets
            .iter()
            .map(|e| SubsetMask::from_elements(e, self.n))
            .collect::<Result<_>>()?;
        SetCoverInstance::new(self.n, self.t, self.s, sets)
    }
}

/// Either instance kind, told apart by its keys.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InstanceFile {
    Tripartition(TripartitionFile),
    SetCover(SetCoverFile),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveResult {
    pub answer: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<[Vec<usize>; 3]>,
    pub trials_used: u64,
    /// Success probability per trial as `"num/den"` (tensor solver only).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub p: Option<String>,
    /// Exact number of ordered solutions, when the solver counts them.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub count: Option<String>,
    /// Tripartition instances produced by the set cover reduction.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub reduction_calls: Option<usize>,
}

pub fn from_json_str<T: serde::de::DeserializeOwned>(text: &str) -> Result<T> {
    // serde_json messages end with "at line L column C"
    serde_json::from_str(text).map_err(|e| Error::Input(e.to_string()))
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &std::path::Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    from_json_str(&text).map_err(|e| match e {
        Error::Input(msg) => Error::Input(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{random_setcover, random_tripartition};
    use crate::tk::{build_tk, group_decomposition};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn decomposition_json_shape() {
        let d = group_decomposition(1, FieldContext::new(7).unwrap()).unwrap();
        let text = to_json_string(&DecompositionFile::from(&d)).unwrap();
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value["p"], 7);
        assert_eq!(value["dims"], serde_json::json!([3, 3, 3]));
        assert_eq!(value["terms"].as_array().unwrap().len(), 4);
        // 1/4 mod 7 = 2
        assert_eq!(value["terms"][0]["scale"], 2);
        let back = from_json_str::<DecompositionFile>(&text)
            .unwrap()
            .into_decomposition()
            .unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn rejects_non_residues_and_bad_shapes() {
        let bad = r#"{"p": 7, "dims": [1,1,1], "terms": [{"u":[9],"v":[1],"w":[1],"scale":1}]}"#;
        assert!(from_json_str::<DecompositionFile>(bad)
            .unwrap()
            .into_decomposition()
            .is_err());
        let short = r#"{"p": 7, "dims": [2,1,1], "terms": [{"u":[1],"v":[1],"w":[1],"scale":1}]}"#;
        assert!(from_json_str::<DecompositionFile>(short)
            .unwrap()
            .into_decomposition()
            .is_err());
        let two = r#"{"n": 1, "families": [[[1]], [[2]]]}"#;
        assert!(from_json_str::<TripartitionFile>(two)
            .unwrap()
            .into_instance()
            .is_err());
        let err =
            from_json_str::<TripartitionFile>("{\n \"n\": 1,\n \"families\": [[[1]]").unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
    }

    #[test]
    fn instance_kinds_are_told_apart() {
        let tri: InstanceFile =
            from_json_str(r#"{"n": 1, "families": [[[1]], [[2]], [[3]]]}"#).unwrap();
        assert!(matches!(tri, InstanceFile::Tripartition(_)));
        let sc: InstanceFile =
            from_json_str(r#"{"n": 3, "t": 3, "s": 1, "sets": [[1],[2],[3]]}"#).unwrap();
        assert!(matches!(sc, InstanceFile::SetCover(_)));
    }

    #[test]
    fn tensor_round_trip() {
        let t = build_tk(2, FieldContext::mersenne31()).unwrap();
        let file = TensorFile::from(&t);
        assert_eq!(file.entries.len(), 90);
        assert_eq!(file.into_tensor().unwrap(), t);
    }

    proptest! {
        #[test]
        fn instance_files_round_trip(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let tri = random_tripartition(3, 4, true, &mut rng).unwrap();
            let text = to_json_string(&TripartitionFile::from(&tri)).unwrap();
            prop_assert_eq!(from_json_str::<TripartitionFile>(&text).unwrap().into_instance().unwrap(), tri);
            let sc = random_setcover(8, 3, 4, 5, true, &mut rng).unwrap();
            let text = to_json_string(&SetCoverFile::from(&sc)).unwrap();
            prop_assert_eq!(from_json_str::<SetCoverFile>(&text).unwrap().into_instance().unwrap(), sc);
        }
    }
}
