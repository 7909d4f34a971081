//! Segmentation of a trajectory into stretches of the six family types.
//!
//! Each row with both `Y` and `Z` gets the sign pair `(sgn Y_m, sgn(Z_m - mQ))`.
//! Scanning left to right, the longest run matching one of the sign templates
//! (in any phase) becomes a segment; ties go to the earlier entry of
//! [`FamilyKind::ALL`]. A zero sign, or a missing row, ends a run.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::equations::Params;
use crate::families::FamilyKind;
use crate::trajectory::Trajectory;
use crate::tropical::Sign;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum Label {
    #[serde(rename = "++")]
    PlusPlus,
    #[serde(rename = "--")]
    MinusMinus,
    #[serde(rename = "-A")]
    MinusA,
    #[serde(rename = "-B")]
    MinusB,
    #[serde(rename = "+A")]
    PlusA,
    #[serde(rename = "+B")]
    PlusB,
    #[serde(rename = "unclassified")]
    Unclassified,
}

impl Label {
    pub fn kind(self) -> Option<FamilyKind> {
        match self {
            Label::PlusPlus => Some(FamilyKind::PlusPlus),
            Label::MinusMinus => Some(FamilyKind::MinusMinus),
            Label::MinusA => Some(FamilyKind::MinusA),
            Label::MinusB => Some(FamilyKind::MinusB),
            Label::PlusA => Some(FamilyKind::PlusA),
            Label::PlusB => Some(FamilyKind::PlusB),
            Label::Unclassified => None,
        }
    }
}

impl From<FamilyKind> for Label {
    fn from(k: FamilyKind) -> Label {
        match k {
            FamilyKind::PlusPlus => Label::PlusPlus,
            FamilyKind::MinusMinus => Label::MinusMinus,
            FamilyKind::MinusA => Label::MinusA,
            FamilyKind::MinusB => Label::MinusB,
            FamilyKind::PlusA => Label::PlusA,
            FamilyKind::PlusB => Label::PlusB,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind() {
            Some(k) => f.write_str(k.label()),
            None => f.write_str("unclassified"),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Segment {
    pub start: i64,
    pub end: i64,
    pub label: Label,
    /// Directly follows a segment with the same label.
    pub joined: bool,
}

impl Segment {
    pub fn contains(&self, m: i64) -> bool {
        self.start <= m && m <= self.end
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
pub struct Segmentation {
    pub segments: Vec<Segment>,
}

impl Segmentation {
    pub fn label_at(&self, m: i64) -> Option<Label> {
        self.segment_at(m).map(|s| s.label)
    }

    pub fn segment_at(&self, m: i64) -> Option<&Segment> {
        self.segments.iter().find(|s| s.contains(m))
    }

    /// Labels in order with consecutive repeats collapsed.
    pub fn label_sequence(&self) -> Vec<Label> {
        let mut out: Vec<Label> = Vec::new();
        for s in &self.segments {
            if out.last() != Some(&s.label) {
                out.push(s.label);
            }
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("segmentation serialises")
    }
}

/// `(sgn Y_m, sgn(Z_m - mQ))`.
pub type SignPair = (Sign, Sign);

/// Cyclic sign patterns for `Y` and `Z`.
fn template(kind: FamilyKind) -> (&'static [Sign], &'static [Sign]) {
    use Sign::{Minus as M, Plus as P};
    match kind {
        FamilyKind::PlusPlus => (&[M], &[P]),
        FamilyKind::MinusMinus => (&[P], &[M]),
        FamilyKind::MinusA => (&[P, P, M], &[M]),
        FamilyKind::MinusB => (&[P], &[M, M, P]),
        FamilyKind::PlusA => (&[M], &[M, P]),
        FamilyKind::PlusB => (&[M, P], &[P]),
    }
}

fn period(kind: FamilyKind) -> usize {
    let (y, z) = template(kind);
    y.len().max(z.len())
}

fn expected(kind: FamilyKind, phase: usize, i: usize) -> SignPair {
    let (y, z) = template(kind);
    (y[(phase + i) % y.len()], z[(phase + i) % z.len()])
}

/// Length of the longest prefix of `pairs` matching `kind` in one phase.
fn run_length(kind: FamilyKind, pairs: &[SignPair]) -> usize {
    (0..period(kind))
        .map(|ph| pairs.iter().enumerate().take_while(|&(i, &s)| s == expected(kind, ph, i)).count())
        .max()
        .unwrap_or(0)
}

/// Whether every pair in `pairs` follows the template of `kind` in one phase.
pub fn fits(kind: FamilyKind, pairs: &[SignPair]) -> bool {
    run_length(kind, pairs) == pairs.len()
}

/// Sign pair of every row carrying both values; `None` where a sign is zero.
pub fn sign_pairs(t: &Trajectory, p: &Params) -> Vec<(i64, Option<SignPair>)> {
    t.rows
        .values()
        .filter_map(|r| {
            let (y, z) = (r.y?, r.z?);
            let pair = Sign::of(y.amp).zip(Sign::of(z.amp - p.mq(r.m)));
            Some((r.m, pair))
        })
        .collect()
}

pub fn classify(t: &Trajectory, p: &Params) -> Segmentation {
    let rows = sign_pairs(t, p);
    let mut segments: Vec<Segment> = Vec::new();
    let mut push = |start: i64, end: i64, label: Label| {
        let joined = segments.last().is_some_and(|s: &Segment| s.label == label && s.end + 1 == start);
        segments.push(Segment { start, end, label, joined });
    };
    let mut i = 0;
    while i < rows.len() {
        let m = rows[i].0;
        if rows[i].1.is_none() {
            let mut j = i;
            while j + 1 < rows.len() && rows[j + 1].1.is_none() && rows[j + 1].0 == rows[j].0 + 1 {
                j += 1;
            }
            push(m, rows[j].0, Label::Unclassified);
            i = j + 1;
            continue;
        }
        // Contiguous nonzero stretch starting here.
        let mut pairs = Vec::new();
        for (k, &(mk, s)) in rows[i..].iter().enumerate() {
            match s {
                Some(s) if mk == m + k as i64 => pairs.push(s),
                _ => break,
            }
        }
        let mut best = (0, FamilyKind::PlusPlus);
        for kind in FamilyKind::ALL {
            let n = run_length(kind, &pairs);
            if n > best.0 {
                best = (n, kind);
            }
        }
        let n = best.0.max(1);
        push(m, m + n as i64 - 1, best.1.into());
        i += n;
    }
    Segmentation { segments }
}
