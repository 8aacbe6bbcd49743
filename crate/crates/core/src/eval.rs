//! Scoring predicted links against gold annotations.

use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::links::{Link, LinkError, LinkSet};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl Counts {
    pub fn precision(&self) -> f64 {
        ratio(self.tp, self.tp + self.fp)
    }

    pub fn recall(&self) -> f64 {
        ratio(self.tp, self.tp + self.fn_)
    }

    pub fn f1(&self) -> f64 {
        f1(self.precision(), self.recall())
    }
}

impl core::ops::Add for Counts {
    type Output = Counts;

    fn add(self, o: Counts) -> Counts {
        Counts {
            tp: self.tp + o.tp,
            fp: self.fp + o.fp,
            fn_: self.fn_ + o.fn_,
        }
    }
}

/// `num / den`, or 1.0 when nothing was counted.
fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        1.0
    } else {
        num as f64 / den as f64
    }
}

pub fn f1(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

fn matches(pred: &Link, gold: &Link) -> bool {
    pred.page == gold.page
        && pred.line == gold.line
        && pred.char_start < gold.char_end
        && gold.char_start < pred.char_end
        && pred.target_qname == gold.target_qname
}

/// Greedy one-to-one matching in reading order: each predicted link takes the
/// first still-unmatched gold link on the same line with an overlapping range
/// and the same target.
pub fn match_links(predicted: &LinkSet, gold: &LinkSet) -> Result<Counts, LinkError> {
    if predicted.document_digest != gold.document_digest {
        return Err(LinkError::DigestMismatch);
    }
    let mut used = alloc::vec![false; gold.len()];
    let mut tp = 0;
    for p in predicted.links() {
        let hit = gold
            .links()
            .iter()
            .enumerate()
            .find(|(i, g)| !used[*i] && matches(p, g));
        if let Some((i, _)) = hit {
            used[i] = true;
            tp += 1;
        }
    }
    Ok(Counts {
        tp,
        fp: predicted.len() as u64 - tp,
        fn_: gold.len() as u64 - tp,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocumentScore {
    pub document: String,
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl DocumentScore {
    pub fn counts(&self) -> Counts {
        Counts {
            tp: self.tp,
            fp: self.fp,
            fn_: self.fn_,
        }
    }
}

/// A corpus document that could not be evaluated.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkippedDocument {
    pub document: String,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub per_document: Vec<DocumentScore>,
    #[serde(default)]
    pub skipped: Vec<SkippedDocument>,
}

impl EvalReport {
    /// Totals are the sums of the per-document counts.
    pub fn from_documents(per_document: Vec<DocumentScore>, skipped: Vec<SkippedDocument>) -> Self {
        let total = per_document.iter().map(DocumentScore::counts).fold(Counts::default(), |a, b| a + b);
        EvalReport {
            tp: total.tp,
            fp: total.fp,
            fn_: total.fn_,
            precision: total.precision(),
            recall: total.recall(),
            f1: total.f1(),
            per_document,
            skipped,
        }
    }

    pub fn counts(&self) -> Counts {
        Counts {
            tp: self.tp,
            fp: self.fp,
            fn_: self.fn_,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::links::tests::link;
    use crate::links::Origin;
    use alloc::vec;

    fn set(links: Vec<Link>) -> LinkSet {
        let d = crate::digest::sha256_hex(b"doc");
        LinkSet::from_links(&*d, &*d, links).unwrap()
    }

    fn gold4() -> Vec<Link> {
        vec![
            link(1, 1, 0, "alpha", "p.alpha", Origin::Manual),
            link(1, 2, 5, "beta", "p.beta", Origin::Manual),
            link(2, 1, 0, "gamma", "p.gamma", Origin::Manual),
            link(2, 3, 8, "delta", "p.delta", Origin::Manual),
        ]
    }

    #[test]
    fn identical_sets() {
        let g = set(gold4());
        assert_eq!(match_links(&g, &g), Ok(Counts { tp: 4, fp: 0, fn_: 0 }));
    }

    #[test]
    fn nothing_predicted() {
        let g = set(gold4());
        let p = set(vec![]);
        assert_eq!(match_links(&p, &g), Ok(Counts { tp: 0, fp: 0, fn_: 4 }));
    }

    #[test]
    fn partial_overlap_and_wrong_target() {
        let g = set(gold4());
        let p = set(vec![
            // overlaps gold "beta" at 5..9
            link(1, 2, 7, "ta.x", "p.beta", Origin::Auto),
            // right place, wrong target
            link(2, 1, 0, "gamma", "p.other", Origin::Auto),
            link(2, 3, 8, "delta", "p.delta", Origin::Auto),
        ]);
        assert_eq!(match_links(&p, &g), Ok(Counts { tp: 2, fp: 1, fn_: 2 }));
    }

    #[test]
    fn matching_is_one_to_one() {
        let g = set(vec![link(1, 1, 0, "abcdef", "p.x", Origin::Manual)]);
        let p = set(vec![
            link(1, 1, 0, "abc", "p.x", Origin::Auto),
            link(1, 1, 3, "def", "p.x", Origin::Auto),
        ]);
        assert_eq!(match_links(&p, &g), Ok(Counts { tp: 1, fp: 1, fn_: 0 }));
    }

    #[test]
    fn digest_mismatch() {
        let g = set(gold4());
        let p = LinkSet::new(crate::digest::sha256_hex(b"other"), g.code_digest.clone());
        assert_eq!(match_links(&p, &g), Err(LinkError::DigestMismatch));
    }

    #[test]
    fn report_conventions() {
        let empty = EvalReport::from_documents(vec![], vec![]);
        assert_eq!((empty.tp, empty.fp, empty.fn_), (0, 0, 0));
        assert_eq!((empty.precision, empty.recall), (1.0, 1.0));
        assert_eq!(empty.f1, 1.0);

        let r = EvalReport::from_documents(
            vec![
                DocumentScore { document: "a".into(), tp: 8, fp: 1, fn_: 2 },
                DocumentScore { document: "b".into(), tp: 1, fp: 1, fn_: 0 },
            ],
            vec![],
        );
        assert_eq!((r.tp, r.fp, r.fn_), (9, 2, 2));
        assert!((r.precision - 9.0 / 11.0).abs() < 1e-12);
        assert!((r.recall - 9.0 / 11.0).abs() < 1e-12);
        assert_eq!(f1(0.0, 0.0), 0.0);
    }
}
