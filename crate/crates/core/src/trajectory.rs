//! Trajectories: rows indexed by `m` with optional `Z` and `Y`, plus how each
//! end of the run stopped.
//!
//! JSON layout:
//! `{"Q","A","entries":[{"m","zeta","Z","eta","Y"}],"termination":{...},"meta":{...}}`.
//! CSV columns are `m,zeta,Z,eta,Y`; absent values are empty cells.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::equations::{check_simul, check_single, Params, SolutionSet, State};
use crate::evolution::Variable;
use crate::tropical::{Amplitude, ParityValue, Sign};
use crate::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Row {
    pub m: i64,
    pub z: Option<ParityValue>,
    pub y: Option<ParityValue>,
}

impl Row {
    pub fn empty(m: i64) -> Row {
        Row { m, z: None, y: None }
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum Termination {
    /// The requested number of steps was taken.
    Horizon,
    Indefinite {
        index: i64,
        var: Variable,
        constraint: SolutionSet,
    },
    NoSolution {
        index: i64,
    },
    /// Rows come from a closed form over a fixed window.
    Window,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Trajectory {
    pub params: Params,
    pub rows: BTreeMap<i64, Row>,
    pub forward: Termination,
    pub backward: Termination,
    pub meta: BTreeMap<String, String>,
}

impl Trajectory {
    pub fn new(params: Params) -> Trajectory {
        Trajectory {
            params,
            rows: BTreeMap::new(),
            forward: Termination::Window,
            backward: Termination::Window,
            meta: BTreeMap::new(),
        }
    }

    pub fn row_mut(&mut self, m: i64) -> &mut Row {
        self.rows.entry(m).or_insert_with(|| Row::empty(m))
    }

    pub fn z(&self, m: i64) -> Option<ParityValue> {
        self.rows.get(&m).and_then(|r| r.z)
    }

    pub fn y(&self, m: i64) -> Option<ParityValue> {
        self.rows.get(&m).and_then(|r| r.y)
    }

    pub fn state(&self, m: i64) -> Option<State> {
        Some(State { m, z: self.z(m)?, y: self.y(m)? })
    }

    pub fn range(&self) -> Option<(i64, i64)> {
        Some((*self.rows.keys().next()?, *self.rows.keys().next_back()?))
    }

    /// Keep only rows with `lo <= m <= hi`.
    pub fn restrict(&mut self, lo: i64, hi: i64) {
        self.rows.retain(|&m, _| lo <= m && m <= hi);
    }

    /// Replace `ε` by a rational everywhere.
    pub fn substitute(&self, at: crate::Rational) -> Trajectory {
        let mut t = self.clone();
        for r in t.rows.values_mut() {
            r.z = r.z.map(|v| v.substitute(at));
            r.y = r.y.map(|v| v.substitute(at));
        }
        t
    }

    /// Indices `m` where a simultaneous equation linking sites `m` and `m+1` fails.
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for (&m, r) in &self.rows {
            let next = self.rows.get(&(m + 1));
            if let (Some(z0), Some(y0), Some(n)) = (r.z, r.y, next) {
                if let (Some(z1), Some(y1)) = (n.z, n.y) {
                    let c = check_simul(&self.params, m, (z0, y0), (z1, y1));
                    if !c.yyz {
                        out.push(Violation { m, equation: "yyz" });
                    }
                    if !c.yzz {
                        out.push(Violation { m, equation: "yzz" });
                    }
                }
            }
        }
        out
    }

    /// Indices `m` where the single equation fails on three consecutive `Z`.
    pub fn single_violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for (&m, r) in &self.rows {
            if let (Some(a), Some(b), Some(c)) = (self.z(m - 1), r.z, self.z(m + 1)) {
                if !check_single(&self.params, m, a, b, c) {
                    out.push(Violation { m, equation: "single" });
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&TrajectoryJson::from(self)).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Trajectory> {
        let j: TrajectoryJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        j.try_into()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("m,zeta,Z,eta,Y\n");
        let cell = |v: Option<ParityValue>| match v {
            Some(v) => (v.sign.to_string(), v.amp.to_string()),
            None => (String::new(), String::new()),
        };
        for r in self.rows.values() {
            let (zs, za) = cell(r.z);
            let (ys, ya) = cell(r.y);
            out.push_str(&format!("{},{zs},{za},{ys},{ya}\n", r.m));
        }
        out
    }
}

/// An equation that fails at index `m`.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub struct Violation {
    pub m: i64,
    pub equation: &'static str,
}

#[derive(Serialize, Deserialize)]
struct EntryJson {
    m: i64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    zeta: Option<Sign>,
    #[serde(rename = "Z", skip_serializing_if = "Option::is_none", default)]
    z: Option<Amplitude>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    eta: Option<Sign>,
    #[serde(rename = "Y", skip_serializing_if = "Option::is_none", default)]
    y: Option<Amplitude>,
}

#[derive(Serialize, Deserialize)]
struct TerminationJson {
    forward: Termination,
    backward: Termination,
}

#[derive(Serialize, Deserialize)]
struct TrajectoryJson {
    #[serde(rename = "Q")]
    q: Amplitude,
    #[serde(rename = "A")]
    a: Amplitude,
    entries: Vec<EntryJson>,
    termination: TerminationJson,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    meta: BTreeMap<String, String>,
}

impl From<&Trajectory> for TrajectoryJson {
    fn from(t: &Trajectory) -> Self {
        TrajectoryJson {
            q: t.params.q,
            a: t.params.a,
            entries: t
                .rows
                .values()
                .map(|r| EntryJson {
                    m: r.m,
                    zeta: r.z.map(|v| v.sign),
                    z: r.z.map(|v| v.amp),
                    eta: r.y.map(|v| v.sign),
                    y: r.y.map(|v| v.amp),
                })
                .collect(),
            termination: TerminationJson { forward: t.forward.clone(), backward: t.backward.clone() },
            meta: t.meta.clone(),
        }
    }
}

impl TryFrom<TrajectoryJson> for Trajectory {
    type Error = Error;

    fn try_from(j: TrajectoryJson) -> Result<Trajectory> {
        let mut t = Trajectory::new(Params::new(j.q, j.a)?);
        let pair = |m: i64, s: Option<Sign>, a: Option<Amplitude>| match (s, a) {
            (Some(s), Some(a)) => Ok(Some(ParityValue::new(s, a))),
            (None, None) => Ok(None),
            _ => Err(Error::Parse(format!("entry {m}: parity and amplitude must come together"))),
        };
        for e in j.entries {
            let row = Row { m: e.m, z: pair(e.m, e.zeta, e.z)?, y: pair(e.m, e.eta, e.y)? };
            t.rows.insert(e.m, row);
        }
        t.forward = j.termination.forward;
        t.backward = j.termination.backward;
        t.meta = j.meta;
        Ok(t)
    }
}
