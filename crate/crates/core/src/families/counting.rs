//! Counting task families.
//!
//! The main family is the color-count histogram: the input is sampled
//! cellwise from a categorical palette and the output draws one bar per
//! nonzero support color, filled bottom-up with that color's pixel count.

use crate::families::FamilyError;
use crate::grid::{Grid, MAX_DIM};
use crate::scm::program::{FeatureValue, RuleOutput, StructuralProgram};
use crate::scm::{ExogenousContext, ExogenousSpec, Scm, ScmBuilder, ScmError, Theme, VariableSpec};
use std::collections::BTreeMap;
use std::sync::Arc;

/// Builds the histogram model. `support` is ordered; its nonzero entries
/// define the output columns left to right. Output height is the maximum
/// per-color count at sampling time (floor 1 so the all-zero input still
/// yields a grid).
pub fn build_color_count(
    id: &str,
    h: usize,
    w: usize,
    support: Vec<u8>,
    probs: Vec<f64>,
) -> Result<Scm, FamilyError> {
    if h == 0 || w == 0 || h > MAX_DIM || w > MAX_DIM {
        return Err(FamilyError::SizeError(format!("input {h}x{w} outside 1..={MAX_DIM}")));
    }
    if !support.contains(&0) {
        return Err(FamilyError::BadSpec("support must include 0".into()));
    }
    let bar_colors: Vec<u8> = support.iter().copied().filter(|&c| c != 0).collect();
    if bar_colors.is_empty() {
        return Err(FamilyError::BadSpec("support needs at least one nonzero color".into()));
    }

    let exogenous = ExogenousSpec::uniform(
        h,
        w,
        VariableSpec::Categorical { support: support.clone(), probs: probs.clone() },
    )?;

    let input_fn = Arc::new(move |ctx: &ExogenousContext| -> Result<Grid, ScmError> {
        Grid::new(h, w, ctx.values().to_vec()).map_err(ScmError::from)
    });

    let colors_for_rule = bar_colors.clone();
    let rule_fn = Arc::new(move |x: &Grid| -> Result<RuleOutput, ScmError> {
        let counts: Vec<usize> = colors_for_rule.iter().map(|&c| x.count_color(c)).collect();
        let height = counts.iter().copied().max().unwrap_or(0).max(1);
        if height > MAX_DIM {
            return Err(ScmError::Rule(format!(
                "histogram bar of height {height} exceeds the {MAX_DIM}-row grid cap"
            )));
        }
        let k = colors_for_rule.len();
        let mut out = Grid::zeros(height, k)?;
        for (col, (&color, &count)) in colors_for_rule.iter().zip(&counts).enumerate() {
            for r in (height - count)..height {
                out.set(r, col, color);
            }
        }
        let mut feature = BTreeMap::new();
        for (&color, &count) in colors_for_rule.iter().zip(&counts) {
            feature.insert(color, count as u32);
        }
        let mut features = BTreeMap::new();
        features.insert("c".to_string(), FeatureValue::CountsByColor(feature));
        Ok(RuleOutput { output: out, features })
    });

    let support_list = support
        .iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(", ");
    let probs_list = probs.iter().map(|p| format!("{p}")).collect::<Vec<_>>().join(", ");
    let bars = bar_colors.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", ");
    let source_text = format!(
        "# color-count family: {h}x{w} input, one output column per nonzero support color\n\
         u ~ Cat(support=[{support_list}], p=[{probs_list}])\n\
         x = u\n\
         c[j] = count(x == j) for j in [{bars}]\n\
         height = max(c) (at least 1)\n\
         y = zeros(height, {k}); y[height - c[j]:, col(j)] = j",
        k = bar_colors.len(),
    );
    let math_notation = format!(
        "u ~ Cat([{support_list}], [{probs_list}]); x = id(u); c = [count(x == j)] for j in support \\ {{0}}; y[-c[j]:, col(j)] = j, 0 elsewhere"
    );

    let mut palette = support;
    palette.sort_unstable();
    palette.dedup();

    let scm = ScmBuilder::new(
        id,
        Theme::Counting,
        exogenous,
        StructuralProgram::new(input_fn, rule_fn, source_text),
        (h, w),
        palette,
    )
    .math_notation(math_notation)
    .build()?;
    Ok(scm)
}

/// The classic fixed-size histogram over support [0, 1, 2, 3, 4] with
/// p = [0.8, 0.05, 0.05, 0.05, 0.05]. Reconstruction of ARC-AGI-1 task
/// f3cdc58f.
pub fn classic_color_count() -> Scm {
    build_color_count(
        "SCMcnt0",
        10,
        10,
        vec![0, 1, 2, 3, 4],
        vec![0.8, 0.05, 0.05, 0.05, 0.05],
    )
    .expect("classic parameters are valid")
}

/// Majority-color model: the output is a single cell holding the most
/// frequent nonzero input color (ties resolved to the smaller color).
/// Artifact-defined counting representative "majority" v1.
pub fn build_majority(id: &str, h: usize, w: usize, colors: Vec<u8>) -> Result<Scm, FamilyError> {
    if h == 0 || w == 0 || h > MAX_DIM || w > MAX_DIM {
        return Err(FamilyError::SizeError(format!("input {h}x{w} outside 1..={MAX_DIM}")));
    }
    if colors.is_empty() || colors.contains(&0) {
        return Err(FamilyError::BadSpec("majority needs nonzero candidate colors".into()));
    }
    let mut support = vec![0u8];
    support.extend(&colors);
    let mut probs = vec![0.6f64];
    probs.extend(std::iter::repeat(0.4 / colors.len() as f64).take(colors.len()));

    let exogenous = ExogenousSpec::uniform(
        h,
        w,
        VariableSpec::Categorical { support: support.clone(), probs },
    )?;

    let input_fn = Arc::new(move |ctx: &ExogenousContext| -> Result<Grid, ScmError> {
        Grid::new(h, w, ctx.values().to_vec()).map_err(ScmError::from)
    });

    let rule_fn = Arc::new(move |x: &Grid| -> Result<RuleOutput, ScmError> {
        let mut counts = [0u32; 10];
        for &c in x.cells() {
            if c != 0 {
                counts[c as usize] += 1;
            }
        }
        let winner = (1u8..=9)
            .max_by_key(|&c| (counts[c as usize], std::cmp::Reverse(c)))
            .unwrap_or(0);
        let winner = if counts[winner as usize] == 0 { 0 } else { winner };
        let mut features = BTreeMap::new();
        features.insert("majority".to_string(), FeatureValue::Scalar(i64::from(winner)));
        Ok(RuleOutput { output: Grid::new(1, 1, vec![winner])?, features })
    });

    let source_text = format!(
        "# artifact-defined counting representative: majority v1\n\
         u ~ Cat over {{0}} + candidate colors, {h}x{w}\n\
         x = u\n\
         y = [[argmax_color count(x == color)]]  # ties -> smaller color, empty -> 0"
    );

    let scm = ScmBuilder::new(
        id,
        Theme::Counting,
        exogenous,
        StructuralProgram::new(input_fn, rule_fn, source_text),
        (h, w),
        support,
    )
    .build()?;
    Ok(scm)
}

/// Tally model: counts pixels of one target color and emits a single row
/// with that many marker cells, left-aligned. Artifact-defined counting
/// representative "tally" v1.
pub fn build_tally(
    id: &str,
    h: usize,
    w: usize,
    target: u8,
    marker: u8,
) -> Result<Scm, FamilyError> {
    if h == 0 || w == 0 || h > MAX_DIM || w > MAX_DIM {
        return Err(FamilyError::SizeError(format!("input {h}x{w} outside 1..={MAX_DIM}")));
    }
    if target == 0 || marker == 0 {
        return Err(FamilyError::BadSpec("tally colors must be nonzero".into()));
    }
    // Density keeps the expected count well under the row width.
    let p = (0.4 * w as f64 / (h as f64 * w as f64)).min(0.2);
    let exogenous = ExogenousSpec::uniform(
        h,
        w,
        VariableSpec::Categorical { support: vec![0, target], probs: vec![1.0 - p, p] },
    )?;

    let input_fn = Arc::new(move |ctx: &ExogenousContext| -> Result<Grid, ScmError> {
        Grid::new(h, w, ctx.values().to_vec()).map_err(ScmError::from)
    });

    let rule_fn = Arc::new(move |x: &Grid| -> Result<RuleOutput, ScmError> {
        let count = x.count_color(target);
        if count > w {
            return Err(ScmError::Rule(format!(
                "tally of {count} exceeds the output row width {w}"
            )));
        }
        let mut out = Grid::zeros(1, w)?;
        for c in 0..count {
            out.set(0, c, marker);
        }
        let mut features = BTreeMap::new();
        features.insert("count".to_string(), FeatureValue::Scalar(count as i64));
        Ok(RuleOutput { output: out, features })
    });

    let source_text = format!(
        "# artifact-defined counting representative: tally v1\n\
         u ~ Cat([0, {target}], sparse), {h}x{w}\n\
         x = u\n\
         y = single row, count(x == {target}) cells of color {marker}, left-aligned"
    );

    let cell_colors = Grid::new(h, w, vec![target; h * w])?;
    let scm = ScmBuilder::new(
        id,
        Theme::Counting,
        exogenous,
        StructuralProgram::new(input_fn, rule_fn, source_text),
        (h, w),
        vec![0, target, marker],
    )
    .cell_colors(cell_colors)
    .build()?;
    Ok(scm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scm::sample_exogenous;

    #[test]
    fn empty_input_gives_all_zero_output() {
        let scm = classic_color_count();
        let ctx = ExogenousContext::from_values(10, 10, vec![0; 100]);
        let eval = scm.evaluate(&ctx).unwrap();
        assert!(eval.pair.output.cells().iter().all(|&c| c == 0));
        assert_eq!(eval.pair.output.shape(), (1, 4));
    }

    #[test]
    fn bar_heights_match_brute_force_counts() {
        let scm = classic_color_count();
        for s in 0..200 {
            let ctx = sample_exogenous(scm.exogenous(), s);
            let eval = scm.evaluate(&ctx).unwrap();
            let x = &eval.pair.input;
            let y = &eval.pair.output;
            // Independent tally, recounted directly from the input cells.
            let mut counts = [0usize; 5];
            for &c in x.cells() {
                counts[c as usize] += 1;
            }
            let expected_height = counts[1..].iter().copied().max().unwrap().max(1);
            assert_eq!(y.rows(), expected_height, "seed {s}");
            for (col, color) in (1u8..=4).enumerate() {
                let bar: usize = (0..y.rows()).filter(|&r| y.get(r, col) == color).count();
                assert_eq!(bar, counts[color as usize], "color {color} seed {s}");
                // Bars grow from the bottom.
                for r in 0..y.rows() {
                    let expect = if r >= y.rows() - counts[color as usize] { color } else { 0 };
                    assert_eq!(y.get(r, col), expect);
                }
            }
        }
    }

    #[test]
    fn column_order_follows_support_order() {
        let scm =
            build_color_count("SCMm5ob", 4, 4, vec![0, 4, 2, 9, 3], vec![0.6, 0.1, 0.1, 0.1, 0.1])
                .unwrap();
        let mut values = vec![0u8; 16];
        values[0] = 4;
        values[1] = 2;
        values[2] = 2;
        let ctx = ExogenousContext::from_values(4, 4, values);
        let eval = scm.evaluate(&ctx).unwrap();
        let y = eval.pair.output;
        // Columns are [4, 2, 9, 3]; counts are [1, 2, 0, 0]; height 2.
        assert_eq!(y.shape(), (2, 4));
        assert_eq!(y.to_rows(), vec![vec![0, 2, 0, 0], vec![4, 2, 0, 0]]);
    }

    #[test]
    fn exactly_three_cells_of_one_color_fill_bottom() {
        let scm = classic_color_count();
        let mut values = vec![0u8; 100];
        values[7] = 2;
        values[33] = 2;
        values[90] = 2;
        let ctx = ExogenousContext::from_values(10, 10, values);
        let eval = scm.evaluate(&ctx).unwrap();
        let y = eval.pair.output;
        assert_eq!(y.rows(), 3);
        let col = 1; // support [0,1,2,3,4] -> column index 1 is color 2
        for r in 0..3 {
            assert_eq!(y.get(r, col), 2);
        }
        assert_eq!(y.count_color(2), 3);
    }

    #[test]
    fn features_expose_per_color_counts() {
        let scm = classic_color_count();
        let ctx = sample_exogenous(scm.exogenous(), 3);
        let eval = scm.evaluate(&ctx).unwrap();
        match eval.features.get("c") {
            Some(FeatureValue::CountsByColor(counts)) => {
                for (&color, &count) in counts {
                    assert_eq!(count as usize, eval.pair.input.count_color(color));
                }
            }
            other => panic!("missing counts feature: {other:?}"),
        }
    }

    #[test]
    fn majority_picks_most_frequent() {
        let scm = build_majority("SCMcnt1", 4, 4, vec![3, 7]).unwrap();
        let mut values = vec![0u8; 16];
        values[0] = 3;
        values[1] = 7;
        values[2] = 7;
        let ctx = ExogenousContext::from_values(4, 4, values);
        let eval = scm.evaluate(&ctx).unwrap();
        assert_eq!(eval.pair.output.cells(), &[7]);
    }

    #[test]
    fn tally_counts_target_pixels() {
        let scm = build_tally("SCMcnt2", 5, 8, 6, 1).unwrap();
        let mut values = vec![0u8; 40];
        values[3] = 6;
        values[17] = 6;
        let ctx = ExogenousContext::from_values(5, 8, values);
        let eval = scm.evaluate(&ctx).unwrap();
        assert_eq!(eval.pair.output.to_rows(), vec![vec![1, 1, 0, 0, 0, 0, 0, 0]]);
    }

    #[test]
    fn support_must_include_zero() {
        assert!(build_color_count("SCMm5ob", 4, 4, vec![1, 2], vec![0.5, 0.5]).is_err());
    }
}
