//! Ranking metrics over scored binary instances. All three sort scores
//! descending with ties kept in input order (stable sort), except `auc`,
//! which is rank-based and gives ties half credit.

use crate::error::{Error, Result};

fn check_lengths(scores: &[f64], labels: &[bool]) -> Result<()> {
    if scores.len() != labels.len() {
        return Err(Error::ShapeMismatch {
            expected: format!("{} labels", scores.len()),
            found: format!("{}", labels.len()),
        });
    }
    Ok(())
}

/// Probability that a uniformly random positive outranks a uniformly
/// random negative, ties counting 1/2. Mann-Whitney U over midranks,
/// one division at the end.
pub fn auc(scores: &[f64], labels: &[bool]) -> Result<f64> {
    check_lengths(scores, labels)?;
    let n = scores.len();
    let n_pos = labels.iter().filter(|&&l| l).count();
    let n_neg = n - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::SingleClass);
    }

    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let mut rank_sum_pos = 0.0;
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && scores[idx[j + 1]] == scores[idx[i]] {
            j += 1;
        }
        // 1-based ranks i+1 .. j+1 share the midrank
        let midrank = (i + j + 2) as f64 / 2.0;
        for &k in &idx[i..=j] {
            if labels[k] {
                rank_sum_pos += midrank;
            }
        }
        i = j + 1;
    }
    let u = rank_sum_pos - (n_pos * (n_pos + 1)) as f64 / 2.0;
    Ok(u / (n_pos as f64 * n_neg as f64))
}

/// Average precision: mean over positives of precision at each
/// positive's rank, no interpolation.
pub fn auprc(scores: &[f64], labels: &[bool]) -> Result<f64> {
    check_lengths(scores, labels)?;
    let n_pos = labels.iter().filter(|&&l| l).count();
    if n_pos == 0 {
        return Err(Error::SingleClass);
    }
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let mut hits = 0usize;
    let mut ap = 0.0;
    for (k, &i) in idx.iter().enumerate() {
        if labels[i] {
            hits += 1;
            ap += hits as f64 / (k + 1) as f64;
        }
    }
    Ok(ap / n_pos as f64)
}

/// Binary-relevance NDCG over the top-p ranks, discount 1/log2(rank+1),
/// ideal = all of the top min(p, #positives) ranks relevant.
pub fn ndcg_at_p(scores: &[f64], labels: &[bool], p: usize) -> Result<f64> {
    check_lengths(scores, labels)?;
    if p < 1 {
        return Err(Error::invalid("p", "must be at least 1"));
    }
    let n_pos = labels.iter().filter(|&&l| l).count();
    if n_pos == 0 {
        return Err(Error::SingleClass);
    }
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let discount = |rank: usize| 1.0 / ((rank + 1) as f64).log2();
    let mut dcg = 0.0;
    for (k, &i) in idx.iter().take(p).enumerate() {
        if labels[i] {
            dcg += discount(k + 1);
        }
    }
    let mut idcg = 0.0;
    for rank in 1..=p.min(n_pos) {
        idcg += discount(rank);
    }
    Ok(dcg / idcg)
}
