//! Grouping positioned text fragments into lines.

use alloc::vec::Vec;
use core::cmp::Ordering;

/// Baseline tolerance used when none is configured, in points.
pub const DEFAULT_BASELINE_TOLERANCE_PT: f64 = 1.5;

/// Anything with a baseline and a horizontal start position in PDF user space.
pub trait Positioned {
    fn baseline(&self) -> f64;
    fn x_start(&self) -> f64;
}

#[derive(Debug, Clone, PartialEq)]
pub struct Line<T> {
    /// 1-based, top to bottom.
    pub number: u32,
    pub mean_baseline: f64,
    pub items: Vec<T>,
}

/// Clusters one page's fragments into lines.
///
/// Fragments are visited top to bottom; a fragment joins the current line when
/// its baseline is within `tolerance` of that line's running mean baseline,
/// otherwise it opens a new line. Lines come out top to bottom (descending y)
/// and their fragments left to right.
pub fn cluster_lines<T: Positioned>(mut items: Vec<T>, tolerance: f64) -> Vec<Line<T>> {
    items.sort_by(|a, b| {
        b.baseline()
            .total_cmp(&a.baseline())
            .then_with(|| a.x_start().total_cmp(&b.x_start()))
    });

    let mut lines: Vec<Line<T>> = Vec::new();
    let mut sum = 0.0;
    for item in items {
        let y = item.baseline();
        match lines.last_mut() {
            Some(line) if (y - line.mean_baseline).abs() <= tolerance => {
                sum += y;
                line.items.push(item);
                line.mean_baseline = sum / line.items.len() as f64;
            }
            _ => {
                sum = y;
                let number = lines.len() as u32 + 1;
                lines.push(Line {
                    number,
                    mean_baseline: y,
                    items: alloc::vec![item],
                });
            }
        }
    }

    for line in &mut lines {
        line.items
            .sort_by(|a, b| a.x_start().partial_cmp(&b.x_start()).unwrap_or(Ordering::Equal));
    }
    lines
}
